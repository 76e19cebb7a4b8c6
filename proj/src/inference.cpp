#include "learnad/inference.hpp"

#include <sstream>

namespace learnad {

Prediction predict(const Hypothesis& hypothesis, const std::vector<ContextFact>& context) {
    Prediction p;
    for (std::size_t r = 0; r < hypothesis.rules.size(); ++r) {
        if (rule_fires(hypothesis.rules[r], context)) p.fired_rules.push_back(r);
    }
    p.label = p.fired_rules.empty() ? Label::CN : Label::AD;
    return p;
}

Prediction predict(const Hypothesis& hypothesis, const Example& example) {
    Prediction p = predict(hypothesis, example.context);
    p.subject_id = example.subject_id.empty() ? example.id : example.subject_id;
    p.truth = example.label;
    return p;
}

std::vector<Prediction> predict_all(const Hypothesis& hypothesis, const std::vector<Example>& examples) {
    std::vector<Prediction> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(predict(hypothesis, ex));
    return out;
}

Metrics metrics_from(const std::vector<Prediction>& predictions) {
    if (predictions.empty()) throw Error("cannot evaluate an empty set");
    Metrics m;
    for (const auto& p : predictions) {
        if (p.truth == Label::AD) (p.label == Label::AD ? m.tp : m.fn) += 1;
        else (p.label == Label::CN ? m.tn : m.fp) += 1;
    }
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
    if (m.tp + m.fn > 0) m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.tn + m.fp > 0) m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
    return m;
}

Metrics evaluate(const Hypothesis& hypothesis, const std::vector<Example>& examples) {
    return metrics_from(predict_all(hypothesis, examples));
}

std::string predictions_csv(const std::vector<Prediction>& predictions) {
    std::ostringstream out;
    out << "subject_id,true_label,predicted_label,fired_rule_ids\n";
    for (const auto& p : predictions) {
        out << p.subject_id << "," << label_name(p.truth) << "," << label_name(p.label) << ",";
        for (std::size_t k = 0; k < p.fired_rules.size(); ++k) {
            if (k > 0) out << ";";
            out << p.fired_rules[k];
        }
        out << "\n";
    }
    return out.str();
}

nlohmann::json metrics_to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"sensitivity", m.sensitivity},
            {"specificity", m.specificity},
            {"confusion", {{"tp", m.tp}, {"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}}}};
}

}  // namespace learnad
