#ifndef PGNBSC_NBAYES_HPP
#define PGNBSC_NBAYES_HPP

#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/types.hpp"

namespace pgnbsc::nbayes {

// Gaussian kernel-density Naive Bayes with uniform priors. In plain-Gaussian
// mode each (class, feature) keeps a single point (the mean) with the class
// standard deviation as bandwidth, which makes the KDE collapse to an
// ordinary Gaussian likelihood.
struct NbClassifier {
  struct ClassModel {
    std::string name;
    std::vector<std::vector<double>> values;  // [feature][training row]
    std::vector<double> bandwidth;            // [feature], always > 0
  };

  std::vector<ClassModel> classes;        // declaration order breaks ties
  std::vector<int> feature_indices;       // registry columns selected by the mask
  std::vector<std::string> feature_names; // parallel to feature_indices
  std::size_t registry_width = 0;
  bool plain_gaussian = false;

  std::vector<double> apply_mask(const std::vector<double>& full) const;
};

// Multiclass training; `classes` fixes declaration order and must all be
// populated in m. The mask selects registry columns.
NbClassifier train(const dataset::FeatureMatrix& m, const std::vector<bool>& mask,
                   const std::vector<SeizureType>& classes, bool plain_gaussian = false);

// Binary positive-vs-rest training for ensembles and wrapper fitness.
// Class order is {seizure_name(target), "rest"}.
NbClassifier train_one_vs_all(const dataset::FeatureMatrix& m, const std::vector<bool>& mask,
                              SeizureType target, bool plain_gaussian = false);

// Per-class log(prior) + sum of log kernel densities; densities are floored
// at 1e-300 so scores stay finite. x must already be masked.
std::vector<double> log_posterior(const NbClassifier& c, const std::vector<double>& x);

// Argmax of log_posterior; ties go to the earlier class.
std::string predict(const NbClassifier& c, const std::vector<double>& x);

// One classifier per effective label, each with its own feature mask.
struct NbEnsemble {
  std::vector<SeizureType> targets;
  std::vector<NbClassifier> classifiers;  // parallel to targets
};

struct EnsembleVote {
  std::vector<bool> votes;       // per classifier: positive class wins?
  std::vector<double> log_odds;  // positive minus rest score
  SeizureType resolved = SeizureType::Absence;
};

// Each classifier applies its own mask to the full vector and votes; the
// positive voter with the highest log-odds resolves the label, falling back
// to the overall max log-odds when nobody votes positive.
EnsembleVote predict_ensemble(const NbEnsemble& e, const std::vector<double>& x);

// Versioned structured-text serialization; floats are stored as hex so the
// round trip is exact.
std::string model_to_text(const NbClassifier& c);
NbClassifier model_from_text(const std::string& body, const std::string& origin);
void save_model(const NbClassifier& c, const std::string& path);
NbClassifier load_model(const std::string& path);

void save_ensemble(const NbEnsemble& e, const std::string& path);
NbEnsemble load_ensemble(const std::string& path);

}  // namespace pgnbsc::nbayes

#endif
