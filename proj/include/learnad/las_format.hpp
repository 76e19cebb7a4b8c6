#pragma once
// Text formats: learning tasks in FastLAS syntax and hypotheses as ASP rules.

#include <filesystem>
#include <string>

#include "learnad/data_model.hpp"
#include "learnad/nkg.hpp"
#include "learnad/rule_learner.hpp"

namespace learnad {

// Byte-deterministic. Throws "task has no examples" on an empty task.
std::string serialize_task(const LearningTask& task);
void write_task_file(const LearningTask& task, const std::filesystem::path& path);

// Inverse of serialize_task.
LearningTask parse_task_text(const std::string& text);

// One rule per line: "ad :- connection(region(I), region(J), V0), V0 < T."
// Region names follow in a trailing comment when an atlas is given.
std::string hypothesis_to_text(const Hypothesis& hypothesis, const RegionAtlas* atlas = nullptr);
Hypothesis parse_hypothesis_text(const std::string& text);

}  // namespace learnad
