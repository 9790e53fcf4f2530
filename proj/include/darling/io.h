// Copyright 2026 The Darling Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DARLING_IO_H_
#define DARLING_IO_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace darling {

// Writes `contents` to `path` via a sibling temp file and rename(2), so
// readers never observe a partially written file.
void WriteFileAtomic(const std::string& path, std::string_view contents);

std::string ReadFile(const std::string& path);

std::vector<std::string> SplitString(std::string_view s, char sep);

std::string_view Trim(std::string_view s);

std::string ToLower(std::string_view s);

// Formats with enough significant digits to round-trip a double.
std::string FormatDouble(double v);

// Runs fn(begin, end, worker) over `threads` contiguous chunks of [0, n).
// threads <= 1 runs inline on the calling thread.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t, std::size_t, int)>& fn);

}  // namespace darling

#endif  // DARLING_IO_H_
