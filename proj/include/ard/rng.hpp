// Copyright 2026 The ARD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARD__RNG_HPP_
#define ARD__RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ard
{

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a list of stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
  std::uint64_t s = splitmix64(base);
  for (const auto t : tags) {
    s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  }
  return s;
}

// Stream tags used across the session loop.
namespace stream
{
inline constexpr std::uint64_t kInitialEnvs = 1;
inline constexpr std::uint64_t kPrior = 2;
inline constexpr std::uint64_t kDesigner = 3;
inline constexpr std::uint64_t kNormalizer = 4;
inline constexpr std::uint64_t kCandidates = 5;
inline constexpr std::uint64_t kAcquisition = 6;
inline constexpr std::uint64_t kEvalEnvs = 7;
inline constexpr std::uint64_t kProbeEnvs = 8;
inline constexpr std::uint64_t kRatio = 9;
inline constexpr std::uint64_t kResample = 10;
inline constexpr std::uint64_t kMove = 11;
inline constexpr std::uint64_t kPlannerInit = 12;
inline constexpr std::uint64_t kInner = 13;
}  // namespace stream

}  // namespace ard

#endif  // ARD__RNG_HPP_
