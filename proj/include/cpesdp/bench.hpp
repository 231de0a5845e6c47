// Copyright 2026 The cpesdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Attacker-side latency of manipulating a batch of released values:
//   DP path:  add attack noise to each released value.
//   AES path: AES-256-CBC decrypt the serialized batch, add the same noise,
//             re-encrypt under a fresh IV.
// Batches are serialized as little-endian IEEE-754 doubles.

#pragma once

#include <openssl/evp.h>
#include <sched.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <fstream>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpesdp/adversary.hpp"
#include "cpesdp/rng.hpp"
#include "cpesdp/series.hpp"
#include "cpesdp/solver.hpp"

namespace cpesdp {

using Bytes = std::vector<std::uint8_t>;
using AesKey = std::array<std::uint8_t, 32>;
using AesIv = std::array<std::uint8_t, 16>;

inline Bytes SerializeLe(std::span<const double> values) {
  Bytes out(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      out[i * 8 + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
  }
  return out;
}

inline std::vector<double> DeserializeLe(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) throw DomainError("byte count is not a multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

// AES-256-CBC with PKCS#7 padding. Owns one reusable cipher context.
class Aes256Cbc {
 public:
  explicit Aes256Cbc(const AesKey& key) : key_(key), ctx_(EVP_CIPHER_CTX_new()) {
    if (!ctx_) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  }

  Bytes Encrypt(std::span<const std::uint8_t> plaintext, const AesIv& iv) {
    Bytes out(plaintext.size() + 16);
    int n1 = 0, n2 = 0;
    if (EVP_EncryptInit_ex(ctx_.get(), EVP_aes_256_cbc(), nullptr, key_.data(), iv.data()) != 1 ||
        EVP_EncryptUpdate(ctx_.get(), out.data(), &n1, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1 ||
        EVP_EncryptFinal_ex(ctx_.get(), out.data() + n1, &n2) != 1) {
      throw std::runtime_error("AES-256-CBC encryption failed");
    }
    out.resize(static_cast<std::size_t>(n1 + n2));
    return out;
  }

  Bytes Decrypt(std::span<const std::uint8_t> ciphertext, const AesIv& iv) {
    Bytes out(ciphertext.size() + 16);
    int n1 = 0, n2 = 0;
    if (EVP_DecryptInit_ex(ctx_.get(), EVP_aes_256_cbc(), nullptr, key_.data(), iv.data()) != 1 ||
        EVP_DecryptUpdate(ctx_.get(), out.data(), &n1, ciphertext.data(),
                          static_cast<int>(ciphertext.size())) != 1 ||
        EVP_DecryptFinal_ex(ctx_.get(), out.data() + n1, &n2) != 1) {
      throw std::runtime_error("AES-256-CBC decryption failed");
    }
    out.resize(static_cast<std::size_t>(n1 + n2));
    return out;
  }

 private:
  struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
  };
  AesKey key_;
  std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx_;
};

struct BenchConfig {
  std::size_t reps = 31;
  std::size_t warmup_reps = 3;
  Seed seed = 0;
  bool pin_thread = true;
};

struct BenchResult {
  double dp_seconds = 0.0;
  double aes_seconds = 0.0;
  double speedup = 0.0;
  std::size_t batch_size = 0;
  std::size_t repetitions = 0;
  std::string cpu_model;
  bool cpu_has_aes_instructions = false;
  std::string timestamp;
};

inline std::string CpuModel() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      return colon == std::string::npos ? line : line.substr(colon + 2);
    }
  }
  return "unknown";
}

inline bool CpuHasAesInstructions() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("flags", 0) == 0) return line.find(" aes") != std::string::npos;
  }
  return false;
}

namespace internal {

inline double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void PinToCurrentCpu() {
  const int cpu = sched_getcpu();
  if (cpu < 0) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  sched_setaffinity(0, sizeof(set), &set);
}

template <class T>
inline void KeepAlive(const T& v) {
  asm volatile("" : : "r"(v.data()) : "memory");
}

}  // namespace internal

// Median wall-clock time per repetition of each path. Both paths inject the
// same attack noise sequence into the same plaintext bytes.
inline BenchResult RunBench(std::span<const double> batch,
                            const AttackProfile& attack,
                            const BenchConfig& cfg = {}) {
  if (batch.empty()) throw DomainError("bench batch must be non-empty");
  if (cfg.reps < 10) throw DomainError("bench needs at least 10 repetitions");
  if (cfg.pin_thread) internal::PinToCurrentCpu();

  Rng key_rng(DeriveSeed(cfg.seed, "bench-key"));
  AesKey key;
  for (auto& b : key) b = static_cast<std::uint8_t>(key_rng.NextBits());
  Aes256Cbc cipher(key);
  const Bytes plaintext = SerializeLe(batch);

  using Clock = std::chrono::steady_clock;
  std::vector<double> dp_times, aes_times;
  for (std::size_t rep = 0; rep < cfg.warmup_reps + cfg.reps; ++rep) {
    Rng iv_rng(DeriveSeed(cfg.seed, "bench-iv", rep));
    AesIv iv, fresh_iv;
    for (auto& b : iv) b = static_cast<std::uint8_t>(iv_rng.NextBits());
    for (auto& b : fresh_iv) b = static_cast<std::uint8_t>(iv_rng.NextBits());
    const Bytes ciphertext = cipher.Encrypt(plaintext, iv);
    const Seed noise_seed = DeriveSeed(cfg.seed, "bench-noise", rep);

    // DP: released values are in the clear.
    std::vector<double> released = DeserializeLe(plaintext);
    const auto t0 = Clock::now();
    {
      Rng rng(noise_seed);
      for (double& v : released) v += SampleAttackNoise(attack, rng);
    }
    const auto t1 = Clock::now();
    internal::KeepAlive(released);

    // AES: decrypt, inject, re-encrypt.
    const auto t2 = Clock::now();
    Bytes reencrypted;
    {
      const Bytes opened = cipher.Decrypt(ciphertext, iv);
      std::vector<double> values = DeserializeLe(opened);
      Rng rng(noise_seed);
      for (double& v : values) v += SampleAttackNoise(attack, rng);
      reencrypted = cipher.Encrypt(SerializeLe(values), fresh_iv);
    }
    const auto t3 = Clock::now();
    internal::KeepAlive(reencrypted);

    if (rep >= cfg.warmup_reps) {
      dp_times.push_back(std::chrono::duration<double>(t1 - t0).count());
      aes_times.push_back(std::chrono::duration<double>(t3 - t2).count());
    }
  }

  BenchResult r;
  r.dp_seconds = internal::Median(dp_times);
  r.aes_seconds = internal::Median(aes_times);
  // Clock granularity can make tiny batches read as zero.
  r.dp_seconds = std::max(r.dp_seconds, 1e-9);
  r.aes_seconds = std::max(r.aes_seconds, 1e-9);
  r.speedup = r.aes_seconds / r.dp_seconds;
  r.batch_size = batch.size();
  r.repetitions = cfg.reps;
  r.cpu_model = CpuModel();
  r.cpu_has_aes_instructions = CpuHasAesInstructions();
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  r.timestamp = buf;
  return r;
}

// Present values of `batch`, attacked at the default operating point
// (scale 20, stealth budget 2).
inline BenchResult RunBench(const MeasurementSeries& batch, std::size_t reps,
                            Seed seed) {
  std::vector<double> values;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.present(i)) values.push_back(batch.values()[i]);
  }
  const auto attack = AttackProfile::FromBudget(PrivacyParams::FromScale(20.0), 2.0);
  return RunBench(values, attack, {.reps = reps, .seed = seed});
}

}  // namespace cpesdp
