#pragma once

// Property checks over seeded random maps, shared by the unit tests and the
// acceptance runner.

#include <cstddef>
#include <cstdint>
#include <string>

namespace properties {

struct Outcome {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool ok() const { return cases > 0 && failures == 0; }
};

/// Engine findings and notes equal the brute-force oracle's. Every
/// `config_every`-th map (when non-zero) uses a random config instead of
/// the defaults.
Outcome oracle_equivalence(std::uint32_t seed, std::size_t maps, std::size_t config_every = 0);

/// Section-1 count law and section-2 biconditional.
Outcome section_laws(std::uint32_t seed, std::size_t maps);

/// Assigning one explicit-nobody task or issue slot removes exactly its gap
/// finding from sections 1 and 4 and introduces nothing there.
Outcome gap_repair(std::uint32_t seed, std::size_t pairs);

/// parse(emit(m)) == m for both formats, and emit is idempotent byte for byte.
Outcome format_round_trips(std::uint32_t seed, std::size_t maps);

/// analyze never throws for random total configs on valid maps.
Outcome config_totality(std::uint32_t seed, std::size_t maps);

}  // namespace properties
