#include "lavs/util.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <thread>
#include <vector>

namespace lavs {

std::string format_sig12(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

double round_sig12(double value) {
  return std::strtod(format_sig12(value).c_str(), nullptr);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_blocks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads == 0 ? 1 : threads;
  if (workers > n) workers = n;
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mu;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&fn, &error, &error_mu, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

LogLevel parse_level(const char* value) {
  if (value == nullptr) return LogLevel::Warn;
  if (std::strcmp(value, "off") == 0) return LogLevel::Off;
  if (std::strcmp(value, "error") == 0) return LogLevel::Error;
  if (std::strcmp(value, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(value, "info") == 0) return LogLevel::Info;
  if (std::strcmp(value, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level(std::getenv("LAVS_LOG"));
  return level;
}

void log(LogLevel level, const std::string& message) {
  if (level == LogLevel::Off || level > log_level()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[lavs] %s\n", message.c_str());
}

}  // namespace lavs
