#ifndef FUNREG_ERRORS_HPP
#define FUNREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace funreg {

/// Error categories carried by every funreg exception. The CLI maps them
/// to exit codes (config -> 2, data -> 3, numeric -> 4).
enum class errc {
    invalid_argument,
    incompatible_grids,
    insufficient_data,
    insufficient_local_data,
    singular_design,
    degenerate_sample,
    degenerate_truth,
    degenerate_direction,
    degenerate_index,
    no_admissible_model,
    id_join,
    parse_error,
    io_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

    /// Extra payload for singular_design (the numerical rank found).
    int rank = -1;

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
    throw Error(code, what);
}

[[noreturn]] inline void raise_singular(int rank, const std::string& what) {
    Error e(errc::singular_design, what);
    e.rank = rank;
    throw e;
}

} // namespace funreg

#endif
