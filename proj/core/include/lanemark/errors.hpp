#pragma once

#include <stdexcept>
#include <string>

namespace lanemark {

/// Bad or missing input data (malformed files, out-of-contract arguments).
/// The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed after inputs were accepted. Carries the stage
/// name so diagnostics identify where a run aborted. CLI exit code 3.
class stage_error : public std::runtime_error {
public:
    stage_error(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace lanemark
