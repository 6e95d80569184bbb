#pragma once

#include <span>
#include <string>
#include <vector>

#include "smm/random.hpp"
#include "smm/selection.hpp"

namespace smm {

/// Named per-class models over one shared alphabet.
struct ReferenceSet {
  std::vector<std::string> names;
  std::vector<SMMModel> models;

  /// Throws InvalidArgument with fewer than two classes or mismatched alphabets.
  void validate() const;
  std::size_t size() const { return models.size(); }
  int max_order() const;
};

/// Full fitting pipeline on one reference sequence (may be split into runs).
SMMModel fit_reference(std::span<const EncodedSequence> runs,
                       const Alphabet& alphabet, int order,
                       const FitOptions& options);

/// Smoothed transition probability (N_{C,a} + alpha) / (N_C + d alpha) of the
/// context's group; unseen contexts and empty unsmoothed groups give 1/d.
double smoothed_probability(const SMMModel& model, std::size_t context,
                            int symbol, double alpha);

/// Sum over t >= m of log p(x_t | x_{t-m}..x_{t-1}); the first m symbols are
/// conditioning only. Returns 0 for segments no longer than m.
double segment_log_likelihood(const SMMModel& model,
                              std::span<const int> segment, double alpha);

struct Classification {
  int label = 0;
  std::vector<double> scores;
};

/// Argmax of per-class log-likelihoods; ties go to the earliest class.
Classification classify(const ReferenceSet& refs, std::span<const int> segment,
                        double alpha);

struct LabeledSequence {
  int label = 0;  // index into the reference set
  std::string id;
  EncodedSequence sequence;
};

struct SampleOutcome {
  std::string id;
  int observed = 0;
  int fitted = -1;  // -1 when skipped
  std::size_t start = 0;
  std::size_t length = 0;
  std::vector<double> scores;
};

struct ConfusionMatrix {
  CountMatrix counts;  // row = observed class, column = fitted class
  std::vector<std::string> skipped;
  std::vector<SampleOutcome> outcomes;

  long long total() const;
  long long correct() const;
  double misclassification_rate() const;
  double accuracy() const { return 1.0 - misclassification_rate(); }
};

/// For each sample: uniform random start, contiguous segment of length
/// ceil(epsilon * len), classify. Segments shorter than max_order + 2 are
/// skipped and recorded.
ConfusionMatrix run_classification_experiment(
    const ReferenceSet& refs, std::span<const LabeledSequence> samples,
    double epsilon, double alpha, Rng& rng);

}  // namespace smm
