#pragma once

#include "chairsearch/engine.hpp"
#include "chairsearch/sim.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace testing {

/// Reference 45-shape engine, built once per process.
const std::shared_ptr<const chairsearch::Engine>& reference_engine();
const chairsearch::SilhouetteLibrary& reference_library();

/// Small engine over the first `shapes` reference shapes.
std::shared_ptr<const chairsearch::Engine> small_engine(std::size_t shapes);

// Hand-rolled generators. All draw from a caller-owned mt19937_64 so a failing
// case is reproducible from its seed.
using Gen = std::mt19937_64;

std::size_t pick(Gen& g, std::size_t n);
double uniform(Gen& g, double lo, double hi);

/// Arbitrary bytes that form valid UTF-8: ASCII, multibyte letters, emoji,
/// combining marks, controls and whitespace.
std::string random_utf8(Gen& g, std::size_t max_code_points);
/// Mix of dictionary surface forms, inflections, unknown words and punctuation,
/// never containing the terminator.
std::string random_word_stream(Gen& g, const chairsearch::Dictionary& dict, std::size_t max_words);
chairsearch::Sketch random_sketch(Gen& g, std::size_t max_strokes);

} // namespace testing

namespace testing {

struct FuzzReport {
    std::size_t ops = 0;
    std::size_t accepted_queries = 0;
    std::size_t rejected_calls = 0;
    std::size_t sessions = 0;
    std::vector<std::string> violations;  // empty when every invariant held
};

/// Random operation sequences against sessions on a manual clock. After every
/// operation checks: at most one non-terminal record, accepted queries carry
/// exactly 5 results, nothing mutates once the session has timed out or closed,
/// and a selection syncs the descriptor to the selected chair.
FuzzReport fuzz_sessions(const std::shared_ptr<const chairsearch::Engine>& engine, std::uint64_t seed,
                         std::size_t ops);

} // namespace testing
