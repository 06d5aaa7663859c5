#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gkd/video.hpp"

namespace gkd {

enum class DatasetMode { single_label, multi_label };

std::string to_string(DatasetMode m);
DatasetMode dataset_mode_from_string(const std::string& s);

// Procedural toy HOI videos. One human per frame plus objects_per_frame
// objects; one designated target object approaches or retreats from the
// stationary human, everything else drifts slowly. Labels require tracking
// that relation across frames, which is what the graph models are for.
struct GenConfig {
  int num_videos = 200;
  int frames_per_video = 12;   // T
  int num_object_types = 4;    // M
  int objects_per_frame = 5;
  double feature_noise_sigma = 0.05;
  double arena_size = 10.0;
  DatasetMode mode = DatasetMode::single_label;
  double proximity_radius = 2.0;

  // one-hot(type, M+1) + position(2) + velocity(2)
  int feature_dim() const { return num_object_types + 1 + 4; }
  int num_classes() const {
    return mode == DatasetMode::single_label ? 2 * num_object_types
                                             : num_object_types;
  }
  void validate() const;
};

// Deterministic for fixed (cfg, seed): each video's stream comes from
// (seed, video_index), and within a video all trajectory draws precede all
// noise draws.
std::vector<VideoSample> generate(const GenConfig& cfg, std::uint64_t seed);

// Re-derives the label from the emitted boxes (their centers are the true,
// noise-free positions). Used as the self-consistency oracle.
int relabel_single(const VideoSample& v, int num_object_types);
std::vector<int> relabel_multi(const VideoSample& v, int num_object_types,
                               double proximity_radius);

void write_jsonl(const std::vector<VideoSample>& dataset,
                 const std::string& path);
std::vector<VideoSample> read_jsonl(const std::string& path);

}  // namespace gkd
