#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gkd {

// Axis-aligned box, x1 < x2 and y1 < y2.
struct Box {
  double x1, y1, x2, y2;
  bool operator==(const Box&) const = default;
};

// One graph node observation. type 0 is the human, types >= 1 are object
// classes.
struct NodeObs {
  int type = 0;
  std::vector<double> feat;
  std::optional<Box> box;
  bool operator==(const NodeObs&) const = default;
};

struct Frame {
  int t = 0;
  std::vector<NodeObs> nodes;
  bool operator==(const Frame&) const = default;
};

// Ordered frames with either a single class index or a binary label vector.
struct VideoSample {
  std::string id;
  std::string subject;
  std::vector<Frame> frames;
  int label = -1;                  // single-label mode
  std::vector<int> labels;         // multi-label mode (binary per class)
  bool multi_label() const { return !labels.empty(); }
  void validate() const;
  bool operator==(const VideoSample&) const = default;
};

}  // namespace gkd
