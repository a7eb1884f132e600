#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace transit {

/// Error category, mapped to process exit codes by the CLI
/// (Input/Io -> 2, Degenerate -> 1).
enum class ErrorKind {
  Input,       // schema violation, referential error, bad argument
  Io,          // file system failure
  Degenerate,  // analysis cannot proceed (empty layer, no positive support, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::Input, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }
[[noreturn]] inline void fail_degenerate(const std::string& msg) { throw Error(ErrorKind::Degenerate, msg); }

/// Shortest round-trip decimal form of a double. Used for every number we
/// serialize so that reruns produce byte-identical files.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// splitmix64 step; the project-wide way to derive independent seeds from the
/// single config seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// n-th derived seed from a base seed (stateless convenience).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n) {
  std::uint64_t s = base;
  std::uint64_t v = 0;
  for (std::uint64_t i = 0; i <= n; ++i) v = splitmix64(s);
  return v;
}

/// Portable uniform double in [0, 1) from a 64-bit generator draw.
inline double uniform01(std::uint64_t raw) { return (raw >> 11) * 0x1.0p-53; }

}  // namespace transit
