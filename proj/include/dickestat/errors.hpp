#pragma once

#include <stdexcept>
#include <string>

namespace dickestat {

// Error taxonomy shared by all modules. Every error is an exception; callers
// that need to keep going (sweeps) catch `Error` and record `code()`.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct SizeError : Error {
    explicit SizeError(const std::string& what) : Error("size", what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error("numeric", what) {}
};

struct UnfoldingError : Error {
    explicit UnfoldingError(const std::string& what) : Error("unfolding", what) {}
};

struct SampleSizeError : Error {
    explicit SampleSizeError(const std::string& what) : Error("sample_size", what) {}
};

struct FitError : Error {
    explicit FitError(const std::string& what) : Error("fit", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace dickestat
