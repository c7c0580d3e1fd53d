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

#include "qtis/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qtis {

using json = nlohmann::json;

SchedulingInstance::SchedulingInstance(std::vector<TaskInterval> tasks, int resources,
                                       std::optional<double> penalty)
    : tasks_(std::move(tasks)), resources_(resources), penalty_(0.0) {
    if (tasks_.empty()) {
        throw InstanceError("tasks", "at least one task is required");
    }
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        const auto& t = tasks_[i];
        const std::string field = "tasks[" + std::to_string(i) + "]";
        if (!std::isfinite(t.start)) throw InstanceError(field + ".start", "must be finite");
        if (!std::isfinite(t.end)) throw InstanceError(field + ".end", "must be finite");
        if (!(t.end > t.start)) {
            throw InstanceError(field + ".end", "must be greater than start (non-positive duration)");
        }
    }
    if (resources_ < 1) {
        throw InstanceError("resources", "must be at least 1");
    }
    if (penalty) {
        if (!std::isfinite(*penalty) || *penalty <= 0.0) {
            throw InstanceError("penalty", "must be a positive finite number");
        }
        penalty_ = *penalty;
    } else {
        penalty_ = static_cast<double>(num_tasks()) * resources_ + 1.0;
    }
}

std::vector<std::pair<int, int>> task_pairs(int n_tasks) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(std::max(0, num_pairs(n_tasks))));
    for (int i = 0; i < n_tasks; ++i) {
        for (int k = i + 1; k < n_tasks; ++k) out.emplace_back(i, k);
    }
    return out;
}

OverlapMatrix::OverlapMatrix(int n_tasks, std::vector<bool> by_pair)
    : n_tasks_(n_tasks), by_pair_(std::move(by_pair)) {
    if (static_cast<int>(by_pair_.size()) != num_pairs(n_tasks_)) {
        throw std::invalid_argument("OverlapMatrix: pair vector has wrong length");
    }
}

bool OverlapMatrix::overlaps(int i, int k) const {
    if (i == k || i < 0 || k < 0 || i >= n_tasks_ || k >= n_tasks_) {
        throw std::out_of_range("OverlapMatrix: invalid task pair");
    }
    if (i > k) std::swap(i, k);
    return by_pair_[static_cast<std::size_t>(pair_rank(i, k, n_tasks_))];
}

int OverlapMatrix::count() const noexcept {
    int c = 0;
    for (bool b : by_pair_) c += b ? 1 : 0;
    return c;
}

bool intervals_overlap(const TaskInterval& a, const TaskInterval& b) noexcept {
    return a.end > b.start && b.end > a.start;
}

OverlapMatrix overlap_matrix(const SchedulingInstance& instance) {
    const int n = instance.num_tasks();
    std::vector<bool> c;
    c.reserve(static_cast<std::size_t>(num_pairs(n)));
    for (auto [i, k] : task_pairs(n)) {
        c.push_back(intervals_overlap(instance.task(i), instance.task(k)));
    }
    return OverlapMatrix(n, std::move(c));
}

SchedulingInstance builtin_test_set(int id) {
    std::vector<TaskInterval> tasks;
    switch (id) {
        case 1: tasks = {{1, 3}, {1.5, 4}, {5, 6}}; break;
        case 2: tasks = {{1, 3}, {1.5, 8}, {2, 6}}; break;
        case 3: tasks = {{1, 3}, {1.5, 4}, {3.5, 6}}; break;
        case 4: tasks = {{1, 2}, {3, 4}, {5, 6}}; break;
        case 5: tasks = {{1, 2}, {3, 5}, {4, 6}}; break;
        case 6: tasks = {{1, 5}, {2, 3}, {4, 6}}; break;
        default:
            throw std::out_of_range("unknown test set " + std::to_string(id) +
                                    " (expected 1.." + std::to_string(kNumBuiltinSets) + ")");
    }
    return SchedulingInstance(std::move(tasks), 2);
}

namespace {

double number_field(const json& obj, const char* key, const std::string& field) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InstanceError(field, "missing");
    if (!it->is_number()) throw InstanceError(field, "must be a number");
    return it->get<double>();
}

}  // namespace

SchedulingInstance load_instance(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw InstanceError("document", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InstanceError("document", "must be a JSON object");

    auto tasks_it = doc.find("tasks");
    if (tasks_it == doc.end()) throw InstanceError("tasks", "missing");
    if (!tasks_it->is_array()) throw InstanceError("tasks", "must be an array");

    std::vector<TaskInterval> tasks;
    for (std::size_t i = 0; i < tasks_it->size(); ++i) {
        const auto& t = (*tasks_it)[i];
        const std::string field = "tasks[" + std::to_string(i) + "]";
        if (!t.is_object()) throw InstanceError(field, "must be an object");
        tasks.push_back({number_field(t, "start", field + ".start"),
                         number_field(t, "end", field + ".end")});
    }

    auto res_it = doc.find("resources");
    if (res_it == doc.end()) throw InstanceError("resources", "missing");
    if (!res_it->is_number_integer()) throw InstanceError("resources", "must be an integer");
    const auto resources = res_it->get<long long>();
    if (resources < 1 || resources > 1'000'000) {
        throw InstanceError("resources", "must be between 1 and 1000000");
    }

    std::optional<double> penalty;
    if (auto p = doc.find("penalty"); p != doc.end() && !p->is_null()) {
        penalty = number_field(doc, "penalty", "penalty");
    }
    return SchedulingInstance(std::move(tasks), static_cast<int>(resources), penalty);
}

SchedulingInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

std::string dump_instance(const SchedulingInstance& instance) {
    json doc;
    doc["tasks"] = json::array();
    for (const auto& t : instance.tasks()) {
        doc["tasks"].push_back({{"start", t.start}, {"end", t.end}});
    }
    doc["resources"] = instance.resources();
    doc["penalty"] = instance.penalty();
    return doc.dump(2);
}

}  // namespace qtis
