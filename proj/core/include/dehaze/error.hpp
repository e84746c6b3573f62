#pragma once

#include <stdexcept>
#include <string>

namespace dehaze {

/// Base class of every exception thrown by the library. `stage` names the
/// pipeline step that raised it ("load", "airlight", ...) and may be empty.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(stage.empty() ? what : stage + ": " + what), stage_(std::move(stage))
    {
    }

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Invalid parameters or preconditions (bad patch size, unknown config key...).
class ConfigError : public Error {
public:
    using Error::Error;
    explicit ConfigError(const std::string& what) : Error("", what) {}
};

/// Coordinate outside of an image.
class BoundsError : public Error {
public:
    using Error::Error;
    explicit BoundsError(const std::string& what) : Error("", what) {}
};

/// File could not be read, decoded or written.
class IoError : public Error {
public:
    using Error::Error;
    explicit IoError(const std::string& what) : Error("", what) {}
};

/// Ill-conditioned numerics: solver did not converge, ambiguous eigenspace...
class NumericError : public Error {
public:
    using Error::Error;
    explicit NumericError(const std::string& what) : Error("", what) {}
};

}  // namespace dehaze
