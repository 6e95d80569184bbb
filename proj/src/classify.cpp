#include "smm/classify.hpp"

#include <algorithm>
#include <cmath>

#include "smm/errors.hpp"

namespace smm {

void ReferenceSet::validate() const {
  if (models.size() < 2) throw InvalidArgument("need at least two classes");
  if (names.size() != models.size()) {
    throw InvalidArgument("class names and models differ in number");
  }
  for (const auto& m : models) {
    if (!(m.alphabet == models.front().alphabet)) {
      throw InvalidArgument("reference alphabets differ");
    }
  }
}

int ReferenceSet::max_order() const {
  int m = 0;
  for (const auto& model : models) m = std::max(m, model.order);
  return m;
}

SMMModel fit_reference(std::span<const EncodedSequence> runs,
                       const Alphabet& alphabet, int order,
                       const FitOptions& options) {
  const ContextCounts counts =
      count_transitions(runs, order, static_cast<int>(alphabet.size()));
  return fit_smm(counts, alphabet, options).model;
}

double smoothed_probability(const SMMModel& model, std::size_t context,
                            int symbol, double alpha) {
  const int g = model.labels[context];
  const double d = static_cast<double>(model.alphabet.size());
  if (g == kUnseenGroup) return 1.0 / d;
  const auto gg = static_cast<std::size_t>(g);
  long long total = 0;
  for (long long c : model.group_counts.row(gg)) total += c;
  if (total == 0 && alpha == 0.0) return 1.0 / d;
  return (static_cast<double>(model.group_counts(gg, static_cast<std::size_t>(symbol))) + alpha) /
         (static_cast<double>(total) + d * alpha);
}

double segment_log_likelihood(const SMMModel& model,
                              std::span<const int> segment, double alpha) {
  if (alpha < 0.0) throw InvalidArgument("smoothing must be nonnegative");
  const auto m = static_cast<std::size_t>(model.order);
  if (segment.size() <= m) return 0.0;
  const int d = static_cast<int>(model.alphabet.size());
  const std::size_t high = model.labels.size() / static_cast<std::size_t>(d);
  std::size_t ctx = context_index(segment.subspan(0, m), d);
  double ll = 0.0;
  for (std::size_t t = m; t < segment.size(); ++t) {
    ll += std::log(smoothed_probability(model, ctx, segment[t], alpha));
    ctx = (ctx % high) * static_cast<std::size_t>(d) +
          static_cast<std::size_t>(segment[t]);
  }
  return ll;
}

Classification classify(const ReferenceSet& refs, std::span<const int> segment,
                        double alpha) {
  Classification out;
  out.scores.reserve(refs.size());
  for (const auto& model : refs.models) {
    out.scores.push_back(segment_log_likelihood(model, segment, alpha));
  }
  // max_element returns the first maximum, which is the tie rule.
  out.label = static_cast<int>(
      std::max_element(out.scores.begin(), out.scores.end()) - out.scores.begin());
  return out;
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (long long v : counts.data()) t += v;
  return t;
}

long long ConfusionMatrix::correct() const {
  long long c = 0;
  for (std::size_t i = 0; i < counts.rows(); ++i) c += counts(i, i);
  return c;
}

double ConfusionMatrix::misclassification_rate() const {
  const long long t = total();
  return t == 0 ? 0.0 : 1.0 - static_cast<double>(correct()) / t;
}

ConfusionMatrix run_classification_experiment(
    const ReferenceSet& refs, std::span<const LabeledSequence> samples,
    double epsilon, double alpha, Rng& rng) {
  refs.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1]");
  }
  const std::size_t k = refs.size();
  ConfusionMatrix cm;
  cm.counts = CountMatrix(k, k, 0);
  const auto min_length = static_cast<std::size_t>(refs.max_order() + 2);
  for (const auto& sample : samples) {
    if (sample.label < 0 || static_cast<std::size_t>(sample.label) >= k) {
      throw InvalidArgument("sample label outside the reference set");
    }
    SampleOutcome outcome;
    outcome.id = sample.id;
    outcome.observed = sample.label;
    const std::size_t len = sample.sequence.size();
    const auto seg_len = static_cast<std::size_t>(
        std::ceil(epsilon * static_cast<double>(len) - 1e-12));
    outcome.length = seg_len;
    if (seg_len < min_length || seg_len > len) {
      cm.skipped.push_back(sample.id);
      cm.outcomes.push_back(std::move(outcome));
      continue;
    }
    outcome.start = static_cast<std::size_t>(rng.uniform_int(len - seg_len + 1));
    const std::span<const int> segment(sample.sequence.codes.data() + outcome.start,
                                       seg_len);
    const Classification c = classify(refs, segment, alpha);
    outcome.fitted = c.label;
    outcome.scores = c.scores;
    ++cm.counts(static_cast<std::size_t>(sample.label),
                static_cast<std::size_t>(c.label));
    cm.outcomes.push_back(std::move(outcome));
  }
  return cm;
}

}  // namespace smm
