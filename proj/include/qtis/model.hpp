// Copyright 2026 The qtis Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qtis {

/// A task occupying the fixed time window [start, end].
struct TaskInterval {
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const TaskInterval&, const TaskInterval&) = default;
};

/// Raised when an instance document or constructor argument is invalid. The
/// message is prefixed with the offending field, e.g. "tasks[1].end: ...".
class InstanceError : public std::invalid_argument {
  public:
    InstanceError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Tasks with fixed windows to be placed on `resources` identical machines.
/// Immutable after construction.
class SchedulingInstance {
  public:
    /// When `penalty` is empty the default I*J + 1 is used.
    SchedulingInstance(std::vector<TaskInterval> tasks, int resources,
                       std::optional<double> penalty = std::nullopt);

    const std::vector<TaskInterval>& tasks() const noexcept { return tasks_; }
    const TaskInterval& task(int i) const { return tasks_.at(static_cast<std::size_t>(i)); }
    int num_tasks() const noexcept { return static_cast<int>(tasks_.size()); }
    int resources() const noexcept { return resources_; }
    double penalty() const noexcept { return penalty_; }

    /// Number of binary decision variables x_ij, I*J.
    int num_vars() const noexcept { return num_tasks() * resources_; }

    friend bool operator==(const SchedulingInstance&, const SchedulingInstance&) = default;

  private:
    std::vector<TaskInterval> tasks_;
    int resources_;
    double penalty_;
};

/// Number of unordered task pairs, N(N-1)/2.
constexpr int num_pairs(int n_tasks) noexcept { return n_tasks * (n_tasks - 1) / 2; }

/// Lexicographic rank of the pair (i, k), i < k, among all pairs of n tasks:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
constexpr int pair_rank(int i, int k, int n_tasks) noexcept {
    return i * n_tasks - i * (i + 1) / 2 + (k - i - 1);
}

/// All (i, k) pairs with i < k in lexicographic order.
std::vector<std::pair<int, int>> task_pairs(int n_tasks);

/// Pairwise overlap coefficients c_ik for i < k.
class OverlapMatrix {
  public:
    OverlapMatrix() = default;
    OverlapMatrix(int n_tasks, std::vector<bool> by_pair);

    int num_tasks() const noexcept { return n_tasks_; }

    /// Symmetric accessor; i != k required.
    bool overlaps(int i, int k) const;

    /// c_ik ordered by pair_rank.
    const std::vector<bool>& by_pair() const noexcept { return by_pair_; }

    int count() const noexcept;

    friend bool operator==(const OverlapMatrix&, const OverlapMatrix&) = default;

  private:
    int n_tasks_ = 0;
    std::vector<bool> by_pair_;
};

/// True when t_e^i > t_s^k and t_e^k > t_s^i. Touching windows do not overlap.
bool intervals_overlap(const TaskInterval& a, const TaskInterval& b) noexcept;

OverlapMatrix overlap_matrix(const SchedulingInstance& instance);

/// Number of built-in benchmark sets.
inline constexpr int kNumBuiltinSets = 6;

/// The three-task, two-resource benchmark sets (ids 1..6).
SchedulingInstance builtin_test_set(int id);

/// Parses the JSON instance document
///   { "tasks": [{"start": r, "end": r}, ...], "resources": int, "penalty": r? }
SchedulingInstance load_instance(std::string_view document);
SchedulingInstance load_instance_file(const std::string& path);

/// Serializes to the document format accepted by load_instance.
std::string dump_instance(const SchedulingInstance& instance);

}  // namespace qtis
