#pragma once

#include <stdexcept>
#include <string>

#include "projseg/scoring.hpp"

namespace projseg {

/// Command run through /bin/sh with {rgb} {jet} {normal} {out} replaced by
/// single-quoted file paths. It must write an SPSC file to {out} and exit 0.
struct ExternalScorerSpec {
  std::string command;
  std::string working_dir;      ///< empty: inherit
  double timeout_seconds = 600.0;

  void validate() const;
};

struct ScorerInputs {
  std::string rgb;
  std::string jet;
  std::string normal;
  std::string out;
};

/// Base of all external scorer failures (CLI exit code 3).
class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScorerExitError : public ScorerError {
 public:
  ScorerExitError(const std::string& what, int status) : ScorerError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class ScorerTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class ScorerOutputError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class ScoreDimensionError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

std::string substitute_placeholders(const std::string& command_template, const ScorerInputs& inputs);

/// Runs the scorer for one view and returns its validated score map.
/// `view_name` only labels error messages.
ScoreMap run_external_scorer(const ExternalScorerSpec& spec, const ScorerInputs& inputs, int height, int width,
                             const std::string& view_name);

}  // namespace projseg
