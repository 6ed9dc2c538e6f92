#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pinchlab {

/// Input that could not be read or parsed (missing file, malformed record).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data that parsed but violates a structural invariant (non-manifold mesh,
/// out-of-range parameter, ill-posed request).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure inside an analysis stage; carries the stage name.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace pinchlab
