#pragma once
// Applies a learned hypothesis to subjects and scores the predictions.

#include <string>
#include <vector>

#include <json.hpp>

#include "learnad/nkg.hpp"
#include "learnad/rule_learner.hpp"

namespace learnad {

struct Prediction {
    std::string subject_id;
    Label truth = Label::CN;
    Label label = Label::CN;                // AD iff fired_rules is nonempty
    std::vector<std::size_t> fired_rules;  // indices into hypothesis.rules
};

struct Metrics {
    std::int64_t tp = 0;  // AD predicted AD
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double accuracy = 0.0;
    double sensitivity = 0.0;  // 0 when there are no AD subjects
    double specificity = 0.0;  // 0 when there are no CN subjects

    std::int64_t total() const { return tp + tn + fp + fn; }
};

Prediction predict(const Hypothesis& hypothesis, const std::vector<ContextFact>& context);
// Carries the example's subject id and label into the prediction.
Prediction predict(const Hypothesis& hypothesis, const Example& example);
std::vector<Prediction> predict_all(const Hypothesis& hypothesis, const std::vector<Example>& examples);

// Throws on an empty prediction list.
Metrics metrics_from(const std::vector<Prediction>& predictions);
Metrics evaluate(const Hypothesis& hypothesis, const std::vector<Example>& examples);

// Columns subject_id,true_label,predicted_label,fired_rule_ids (ids joined by ';').
std::string predictions_csv(const std::vector<Prediction>& predictions);

nlohmann::json metrics_to_json(const Metrics& m);

}  // namespace learnad
