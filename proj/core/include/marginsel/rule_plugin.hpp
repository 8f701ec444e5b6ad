#pragma once

// External selection rules run as subprocesses.
//
// The rule receives one sample on standard input, one JSON object per line
// ({"x": <label>, "y": <0|1>}), and writes a single number to standard
// output: the selected model index for a deterministic rule, or the
// probability of selecting model 1 for a randomized two-model rule.

#include <string>

#include "marginsel/core.hpp"

namespace marginsel {

class ExternalRule {
public:
  enum class Output { model_index, probability };

  /// `command` is run through /bin/sh -c.
  ExternalRule(std::string command, Output output);

  const std::string& command() const noexcept { return command_; }
  Output output() const noexcept { return output_; }

  /// Runs the rule once. Throws std::runtime_error when the process fails,
  /// exits nonzero or prints something that does not parse; a probability
  /// outside [0, 1] is also rejected.
  double run(const Sample& sample) const;

private:
  std::string command_;
  Output output_;
};

/// The JSON-lines text sent to an external rule.
std::string sample_to_json_lines(const Sample& sample);

} // namespace marginsel
