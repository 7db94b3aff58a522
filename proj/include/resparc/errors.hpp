// Error taxonomy shared across the library. The CLI maps these to exit codes:
// InputError -> 1, CapacityError -> 2, SimError -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace resparc {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace resparc
