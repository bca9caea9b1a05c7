#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace lavs {

// %.12g formatting used for every numeric value we serialize.
std::string format_sig12(double value);

// Round-trips a value through the 12-significant-digit text form so numbers
// embedded in JSON match the CSV text exactly.
double round_sig12(double value);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 1469598103934665603ull);

// Runs fn over [0, n) split into contiguous blocks, one per worker. Callers
// must keep block outputs independent and must not let results depend on
// where the block boundaries fall.
void parallel_blocks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

enum class LogLevel { Off = 0, Error, Warn, Info, Debug };

// Verbosity comes from the LAVS_LOG environment variable (off, error, warn,
// info, debug). Log output goes to stderr and never to data outputs.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

}  // namespace lavs
