// Copyright 2026 The losstree Authors
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

#ifndef LOSSTREE_ERROR_HPP
#define LOSSTREE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace losstree {

/// Malformed or out-of-range arguments (empty branching vector, eps0 outside [0,1], ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Work exceeds a hard capacity guard, e.g. exact enumeration of a tree that is too large.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// A forced measurement outcome disagrees with the outcome the stabilizer group fixes.
class Contradiction : public std::logic_error {
 public:
  explicit Contradiction(const std::string& what) : std::logic_error(what) {}
};

}  // namespace losstree

#endif  // LOSSTREE_ERROR_HPP
