#pragma once

#include <vector>

#include "physbench/render.hpp"

namespace physbench {

/// m consecutive input frames and the frame that follows them.
struct Clip {
  std::vector<Frame> inputs;
  Frame target;
  int video = 0;
  int start = 0;  // index of the first input frame in the source video
};

/// All contiguous windows of m inputs plus one target. Needs at least m + 1 frames.
std::vector<Clip> extract_windows(const std::vector<Frame>& video, int m, int video_id = 0);

}  // namespace physbench
