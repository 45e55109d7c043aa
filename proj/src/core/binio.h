// Copyright 2026  The trivox authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIVOX_CORE_BINIO_H_
#define TRIVOX_CORE_BINIO_H_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "core/check.h"

namespace trivox::binio {

// All on-disk binary formats are little-endian. These helpers assume a
// little-endian host (checked once at startup in the CLI).

inline bool host_is_little_endian() {
  const uint32_t x = 1;
  uint8_t b;
  std::memcpy(&b, &x, 1);
  return b == 1;
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  TVX_CHECK(bool(is)) << "truncated file while reading " << what;
  return v;
}

inline void write_magic(std::ostream& os, const char magic[5]) {
  os.write(magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[5],
                         const std::string& path) {
  char buf[4];
  is.read(buf, 4);
  TVX_CHECK(bool(is) && std::memcmp(buf, magic, 4) == 0)
      << path << ": bad magic, expected \"" << magic << "\"";
}

template <typename T>
void write_array(std::ostream& os, const T* data, size_t n) {
  os.write(reinterpret_cast<const char*>(data), std::streamsize(n * sizeof(T)));
}

template <typename T>
void read_array(std::istream& is, T* data, size_t n, const char* what) {
  is.read(reinterpret_cast<char*>(data), std::streamsize(n * sizeof(T)));
  TVX_CHECK(bool(is)) << "truncated file while reading " << what;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  TVX_CHECK(os.good()) << "cannot open for writing: " << path;
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TVX_CHECK(is.good()) << "cannot open for reading: " << path;
  return is;
}

// FNV-1a, used for provenance/idempotence hashing (not cryptographic).
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a_str(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

inline uint64_t hash_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TVX_CHECK(is.good()) << "cannot hash missing file: " << path;
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof(buf));
    h = fnv1a(buf, size_t(is.gcount()), h);
  }
  return h;
}

}  // namespace trivox::binio

#endif  // TRIVOX_CORE_BINIO_H_
