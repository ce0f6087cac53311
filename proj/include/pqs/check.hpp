#pragma once

#include <stdexcept>
#include <string>

// Internal consistency checks that must survive release builds; these guard
// exactness invariants (integrality, table coherence), not user input.
#define PQS_CHECK(cond, msg)                                             \
    do {                                                                 \
        if (!(cond)) throw std::logic_error(std::string("invariant: ") + (msg)); \
    } while (0)
