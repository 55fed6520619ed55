#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vsrboost/resample.hpp"
#include "vsrboost/trdm.hpp"

namespace vsrboost {

/// Temporal slice of one grid position: 1, 3 or 5 co-located LR patches in
/// frame order, the target frame in the middle.
struct PatchSlice {
  std::size_t grid_index = 0;
  int x = 0;
  int y = 0;
  std::vector<ByteImage> frames;

  const ByteImage& center() const { return frames.at(frames.size() / 2); }
};

/// Anything that maps LR patch slices to SR patches.
class Backend {
 public:
  virtual ~Backend() = default;

  /// One output patch per slice, `scale` times larger than the slice frames.
  virtual std::vector<ByteImage> super_resolve(std::span<const PatchSlice> batch, int scale) = 0;
};

/// Single-image resampler applied to the center frame of each slice.
class ResamplerBackend final : public Backend {
 public:
  explicit ResamplerBackend(ResampleKernel kernel) : kernel_(kernel) {}
  std::vector<ByteImage> super_resolve(std::span<const PatchSlice> batch, int scale) override;

 private:
  ResampleKernel kernel_;
};

enum class BackendKind { builtin_bicubic, builtin_lanczos, builtin_nearest, remote };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& text);

struct BackendDescriptor {
  std::string backend_id;
  MovementLabel handles_label = MovementLabel::L5;
  int frames_consumed = 5;
  double cost_weight = 1.0;
  BackendKind kind = BackendKind::builtin_bicubic;

  void validate() const;
};

/// Relative per-patch cost of each branch.
struct CostWeights {
  double l1 = 0.2;
  double l3 = 0.6;
  double l5 = 1.0;

  double of(MovementLabel label) const noexcept {
    switch (label) {
      case MovementLabel::L1: return l1;
      case MovementLabel::L3: return l3;
      case MovementLabel::L5: return l5;
    }
    return l5;
  }
};

/// Label -> (descriptor, implementation). Immutable once a run starts.
class BackendRegistry {
 public:
  struct Entry {
    BackendDescriptor descriptor;
    std::shared_ptr<Backend> backend;
  };

  void add(BackendDescriptor descriptor, std::shared_ptr<Backend> backend);
  const Entry* find(MovementLabel label) const noexcept;
  const Entry& at(MovementLabel label) const;

  /// The same builtin resampler on every label with the given weights.
  static BackendRegistry builtin(BackendKind kind, const CostWeights& weights = {});
  /// One shared backend on every label.
  static BackendRegistry uniform(std::shared_ptr<Backend> backend, BackendKind kind,
                                 const CostWeights& weights = {});

 private:
  std::map<MovementLabel, Entry> entries_;
};

std::shared_ptr<Backend> make_builtin_backend(BackendKind kind);

}  // namespace vsrboost
