#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "physbench/baselines.hpp"
#include "physbench/commands.hpp"
#include "physbench/dataset_io.hpp"
#include "physbench/errors.hpp"
#include "physbench/generate.hpp"
#include "physbench/metrics.hpp"
#include "physbench/scenarios.hpp"

namespace py = pybind11;
using namespace physbench;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Frame frame_from_array(const Array& a) {
  if (a.ndim() != 2) throw InvalidInput("frames must be 2-D arrays");
  Frame f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), f.pixels().begin());
  return f;
}

std::vector<Frame> frames_from_array(const Array& a) {
  if (a.ndim() == 2) return {frame_from_array(a)};
  if (a.ndim() != 3) throw InvalidInput("frame stacks must be 3-D arrays");
  std::vector<Frame> out;
  const auto h = a.shape(1), w = a.shape(2);
  for (py::ssize_t t = 0; t < a.shape(0); ++t) {
    Frame f(static_cast<int>(w), static_cast<int>(h));
    std::copy(a.data(t, 0, 0), a.data(t, 0, 0) + h * w, f.pixels().begin());
    out.push_back(std::move(f));
  }
  return out;
}

py::array_t<double> to_array(const std::vector<Frame>& frames) {
  if (frames.empty()) return py::array_t<double>(std::vector<py::ssize_t>{0, kFrameSize, kFrameSize});
  const py::ssize_t h = frames.front().height(), w = frames.front().width();
  py::array_t<double> out({static_cast<py::ssize_t>(frames.size()), h, w});
  double* dst = out.mutable_data();
  for (const auto& f : frames) dst = std::copy(f.pixels().begin(), f.pixels().end(), dst);
  return out;
}

py::array_t<double> to_array(const Frame& f) {
  py::array_t<double> out({static_cast<py::ssize_t>(f.height()), static_cast<py::ssize_t>(f.width())});
  std::copy(f.pixels().begin(), f.pixels().end(), out.mutable_data());
  return out;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<double> doubles(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict labels_dict(const std::vector<LabelSet>& labels) {
  py::dict d;
  for (const auto& l : labels) {
    py::dict e;
    e["raw"] = l.raw_value;
    e["normalized"] = l.normalized_value;
    e["input_frames"] = l.input_frames_m;
    d[py::str(std::string(to_string(l.task)))] = e;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Physics video benchmark: datasets, metrics and baselines";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<InvalidTask>(m, "InvalidTask", base.ptr());
  py::register_exception<DegenerateLabels>(m, "DegenerateLabels", base.ptr());
  py::register_exception<NumericFailure>(m, "NumericFailure", base.ptr());
  py::register_exception<SimulationFailure>(m, "SimulationFailure", base.ptr());
  auto dataset_error = py::register_exception<DatasetError>(m, "DatasetError", base.ptr());
  py::register_exception<MissingFrameError>(m, "MissingFrameError", dataset_error.ptr());
  py::register_exception<FormatError>(m, "FormatError", dataset_error.ptr());
  py::register_exception<SchemaVersionError>(m, "SchemaVersionError", dataset_error.ptr());
  py::register_exception<IoError>(m, "IoError", dataset_error.ptr());

  m.attr("FRAME_SIZE") = kFrameSize;
  m.attr("PROBE_BETA") = kProbeBeta;
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  std::vector<std::string> datasets, tasks;
  for (DatasetId d : kAllDatasets) datasets.emplace_back(to_string(d));
  for (TaskId t : kAllTasks) tasks.emplace_back(to_string(t));
  m.attr("DATASETS") = py::tuple(py::cast(datasets));
  m.attr("TASKS") = py::tuple(py::cast(tasks));

  m.def("tasks_of", [](const std::string& dataset) {
    std::vector<std::string> out;
    for (TaskId t : tasks_of(parse_dataset_id(dataset))) out.emplace_back(to_string(t));
    return out;
  });
  m.def("dataset_of", [](const std::string& task) { return std::string(to_string(dataset_of(parse_task_id(task)))); });
  m.def("input_frames", [](const std::string& task) { return input_frames(parse_task_id(task)); },
        "Number of input frames m the task's model sees.");
  m.def("frames_per_video", [](const std::string& dataset) { return frames_per_video(parse_dataset_id(dataset)); });
  m.def("label_grid", [](const std::string& task) { return label_grid(parse_task_id(task)); });
  m.def("grid_population_std", [](const std::string& task) { return grid_population_std(parse_task_id(task)); });

  // Metrics. Frames are 2-D float arrays in [0, 1].
  m.def("psnr", [](const Array& a, const Array& b) { return psnr(frame_from_array(a), frame_from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("ssim", [](const Array& a, const Array& b) { return ssim(frame_from_array(a), frame_from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("ssim_loss", [](const Array& a, const Array& b) { return ssim_loss(frame_from_array(a), frame_from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("l1", [](const Array& a, const Array& b) { return l1(frame_from_array(a), frame_from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("smooth_l1",
        [](const Array& pred, const Array& target, double beta) {
          return smooth_l1(doubles(pred), doubles(target), beta);
        },
        py::arg("pred"), py::arg("target"), py::arg("beta") = kProbeBeta, "Mean smooth-L1 over paired elements.");
  m.def("score_rollout",
        [](const Array& pred, const Array& truth) {
          const MetricReport r = score_rollout(frames_from_array(pred), frames_from_array(truth));
          py::dict d;
          d["psnr"] = r.psnr;
          d["ssim"] = r.ssim;
          d["l1"] = r.l1;
          d["psnr_per_frame"] = r.psnr_per_frame;
          d["ssim_per_frame"] = r.ssim_per_frame;
          d["l1_per_frame"] = r.l1_per_frame;
          return d;
        },
        py::arg("pred"), py::arg("truth"));

  // Baselines.
  m.def("normalize_labels",
        [](const Array& raw) {
          const NormalizedLabels n = normalize_labels(doubles(raw));
          return py::make_tuple(to_array(n.scaled), n.scale);
        },
        py::arg("raw"), "Returns (labels / population std, population std).");
  m.def("optimal_constant",
        [](const Array& labels, double beta) {
          const BaselineResult r = optimal_constant(doubles(labels), beta);
          return py::make_tuple(r.constant, r.loss);
        },
        py::arg("labels"), py::arg("beta") = kProbeBeta, "Returns (constant, loss).");
  m.def("baseline_report",
        [](const std::filesystem::path& dataset_dir, const std::string& task) {
          return to_py(baseline_task_report(dataset_dir, parse_task_id(task)));
        },
        py::arg("dataset_dir"), py::arg("task"));

  // Generation and dataset access.
  m.def("generate_video",
        [](const std::string& dataset, std::uint64_t master_seed, int index, int n_videos) {
          GeneratedVideo v = generate_video(parse_dataset_id(dataset), master_seed, index, n_videos);
          return py::make_tuple(to_array(v.frames), labels_dict(v.record.labels), to_py(params_to_json(v.record.params)));
        },
        py::arg("dataset"), py::arg("master_seed"), py::arg("index"), py::arg("n_videos"),
        "Returns (frames[T, H, W], labels, params) without touching disk.");
  m.def("generate",
        [](const std::string& dataset, const std::filesystem::path& root, int n_videos, std::uint64_t seed, int jobs,
           bool overwrite) {
          GenerateConfig c;
          c.dataset = parse_dataset_id(dataset);
          c.root = root;
          c.n_videos = n_videos;
          c.master_seed = seed;
          c.jobs = jobs;
          c.overwrite = overwrite;
          nlohmann::json report;
          {
            py::gil_scoped_release release;
            report = run_generate(c);
          }
          return to_py(report);
        },
        py::arg("dataset"), py::arg("root"), py::arg("n_videos") = 0, py::arg("seed") = 0, py::arg("jobs") = 1,
        py::arg("overwrite") = false);
  m.def("score",
        [](const std::filesystem::path& pred, const std::filesystem::path& truth, bool rollout) {
          ScoreConfig c;
          c.pred = pred;
          c.truth = truth;
          c.rollout = rollout;
          return to_py(run_score(c));
        },
        py::arg("pred"), py::arg("truth"), py::arg("rollout") = false);
  m.def("write_frames",
        [](const std::filesystem::path& dir, const Array& frames) {
          std::filesystem::create_directories(dir);
          const auto fs = frames_from_array(frames);
          for (std::size_t k = 0; k < fs.size(); ++k) write_pgm(dir / ("frame_" + std::to_string(k) + ".pgm"), fs[k]);
        },
        py::arg("dir"), py::arg("frames"), "Writes frame_<k>.pgm files, quantized to 8 bits.");
  m.def("read_pgm", [](const std::filesystem::path& p) { return to_array(read_pgm(p)); });

  py::class_<DatasetReader>(m, "Dataset")
      .def(py::init<const std::filesystem::path&>(), py::arg("dataset_dir"))
      .def_property_readonly("directory", &DatasetReader::directory)
      .def_property_readonly("manifest", [](const DatasetReader& r) { return to_py(manifest_to_json(r.manifest())); })
      .def("__len__", [](const DatasetReader& r) { return r.manifest().videos.size(); })
      .def("frame", [](const DatasetReader& r, int video, int k) { return to_array(r.frame(video, k)); },
           py::arg("video"), py::arg("k"))
      .def("video", [](const DatasetReader& r, int video, int count) { return to_array(r.video_frames(video, count)); },
           py::arg("video"), py::arg("count") = -1)
      .def("labels",
           [](const DatasetReader& r, const std::string& task) {
             const TaskId t = parse_task_id(task);
             std::vector<double> out;
             for (const auto& v : r.manifest().videos) {
               bool found = false;
               for (const auto& l : v.labels) {
                 if (l.task == t) {
                   out.push_back(l.raw_value);
                   found = true;
                 }
               }
               if (!found) throw InvalidTask(std::string(task) + " is not a task of this dataset");
             }
             return out;
           },
           py::arg("task"), "Raw labels of every video, in index order.")
      .def("split", [](const DatasetReader& r, const std::string& name) {
        std::vector<int> out;
        for (const auto& v : r.manifest().videos)
          if (v.split == name) out.push_back(v.index);
        return out;
      });
}
