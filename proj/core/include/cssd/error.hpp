#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cssd {

/// Error categories raised by the library. Input-shaped problems (bad data,
/// bad parameters) are distinct from numerical failures so callers can map
/// them to different exit codes.
enum class errc {
    empty_input,
    non_finite_value,
    non_positive_delta,
    too_few_points,
    non_positive_gap,
    invalid_p,
    invalid_gamma,
    non_increasing_x,
    bad_fold_count,
    degenerate_fold,
    out_of_domain,
    corrupt_traceback,
    too_large_for_oracle,
    oracle_failure,
    numerical_failure,
    invalid_argument,
};

const char* errc_name(errc code) noexcept;

/// Whether an error class indicates a defect in the input rather than a
/// numerical breakdown while computing.
bool is_data_error(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    Error(errc code, const std::string& message, std::size_t index)
        : std::runtime_error(message + " (index " + std::to_string(index) + ")"),
          code_(code),
          index_(index) {}

    errc code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    errc code_;
    std::optional<std::size_t> index_;
};

}  // namespace cssd
