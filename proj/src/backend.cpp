#include "vsrboost/backend.hpp"

namespace vsrboost {

std::vector<ByteImage> ResamplerBackend::super_resolve(std::span<const PatchSlice> batch,
                                                       int scale) {
  std::vector<ByteImage> out;
  out.reserve(batch.size());
  for (const auto& slice : batch) {
    out.push_back(resample(slice.center(), Scale::up(scale), {kernel_}));
  }
  return out;
}

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::builtin_bicubic: return "builtin-bicubic";
    case BackendKind::builtin_lanczos: return "builtin-lanczos";
    case BackendKind::builtin_nearest: return "builtin-nearest";
    case BackendKind::remote: return "remote";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(const std::string& text) {
  for (auto kind : {BackendKind::builtin_bicubic, BackendKind::builtin_lanczos,
                    BackendKind::builtin_nearest, BackendKind::remote}) {
    if (to_string(kind) == text) return kind;
  }
  throw InvalidArgument("unknown backend kind '" + text + "'");
}

void BackendDescriptor::validate() const {
  if (frames_consumed != vsrboost::frames_consumed(handles_label)) {
    throw InvalidArgument("backend '" + backend_id + "' consumes " +
                          std::to_string(frames_consumed) + " frames but handles " +
                          to_string(handles_label));
  }
  if (!(cost_weight > 0)) {
    throw InvalidArgument("backend '" + backend_id + "' needs a positive cost weight");
  }
}

void BackendRegistry::add(BackendDescriptor descriptor, std::shared_ptr<Backend> backend) {
  descriptor.validate();
  if (!backend) throw InvalidArgument("backend '" + descriptor.backend_id + "' is null");
  const auto label = descriptor.handles_label;
  entries_[label] = Entry{std::move(descriptor), std::move(backend)};
}

const BackendRegistry::Entry* BackendRegistry::find(MovementLabel label) const noexcept {
  auto it = entries_.find(label);
  return it == entries_.end() ? nullptr : &it->second;
}

const BackendRegistry::Entry& BackendRegistry::at(MovementLabel label) const {
  if (const auto* e = find(label)) return *e;
  throw BackendError("no backend registered for label " + to_string(label));
}

std::shared_ptr<Backend> make_builtin_backend(BackendKind kind) {
  switch (kind) {
    case BackendKind::builtin_bicubic:
      return std::make_shared<ResamplerBackend>(ResampleKernel::cubic);
    case BackendKind::builtin_lanczos:
      return std::make_shared<ResamplerBackend>(ResampleKernel::lanczos3);
    case BackendKind::builtin_nearest:
      return std::make_shared<ResamplerBackend>(ResampleKernel::nearest);
    case BackendKind::remote: break;
  }
  throw InvalidArgument("remote backends are created from a client endpoint");
}

BackendRegistry BackendRegistry::uniform(std::shared_ptr<Backend> backend, BackendKind kind,
                                         const CostWeights& weights) {
  BackendRegistry registry;
  for (auto label : kAllLabels) {
    registry.add({to_string(kind) + "-" + to_string(label), label, frames_consumed(label),
                  weights.of(label), kind},
                 backend);
  }
  return registry;
}

BackendRegistry BackendRegistry::builtin(BackendKind kind, const CostWeights& weights) {
  return uniform(make_builtin_backend(kind), kind, weights);
}

}  // namespace vsrboost
