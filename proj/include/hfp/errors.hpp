#pragma once

#include <stdexcept>
#include <string>

namespace hfp {

/// Base of every error raised by the library. `domain()` distinguishes
/// input/domain failures (bad geometry, infeasible plans, invalid config)
/// from I/O failures so callers can map them to exit codes.
class Error : public std::runtime_error {
public:
    enum class Category { Domain, Io };

    explicit Error(const std::string& what, Category category = Category::Domain)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

#define HFP_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what)                     \
            : Error(std::string(#Name ": ") + what) {}             \
    }

HFP_DEFINE_ERROR(DistanceOutOfRange);
HFP_DEFINE_ERROR(DegenerateTrip);
HFP_DEFINE_ERROR(InvalidArgument);
HFP_DEFINE_ERROR(OutOfDomain);
HFP_DEFINE_ERROR(Infeasible);
HFP_DEFINE_ERROR(NoSuccessors);
HFP_DEFINE_ERROR(WidthOutOfRange);
HFP_DEFINE_ERROR(NoPath);
HFP_DEFINE_ERROR(SamplingExhausted);
HFP_DEFINE_ERROR(DegenerateDistance);
HFP_DEFINE_ERROR(NonFiniteGradient);
HFP_DEFINE_ERROR(ConfigError);
HFP_DEFINE_ERROR(SchemaError);

#undef HFP_DEFINE_ERROR

/// Malformed text input; carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error("ParseError: " + source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError: " + what, Category::Io) {}
};

}  // namespace hfp
