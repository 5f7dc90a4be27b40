#pragma once

#include <memory>
#include <string>
#include <vector>

#include "limitlearn/adversary.hpp"
#include "limitlearn/io.hpp"
#include "limitlearn/learner.hpp"

namespace limitlearn {

class UnknownName : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::vector<std::string> learner_names() {
  return {"M",    "Mstar",  "fin",    "txt-Mstar", "constant:<member index or character>", "two-stage",
          "char-fit", "echo", "parity", "locking-Mstar"};
}

namespace detail {

/// Separability-dependent learners run unchecked on families they cannot
/// learn, so adversaries have something to defeat.
inline bool learnable_setting(const std::vector<Character>& fam) {
  for (const auto& c : fam)
    if (c.has_infinite_classes()) return false;
  return finitely_separable(fam).separable;
}

}  // namespace detail

inline std::unique_ptr<Learner> make_learner(const std::string& name, const std::vector<Character>& fam) {
  const bool checked = detail::learnable_setting(fam);
  if (name == "M") return std::make_unique<MLearner>(fam, checked);
  if (name == "Mstar") return std::make_unique<MStarLearner>(fam, checked);
  if (name == "fin") return std::make_unique<FinLearner>(fam);
  if (name == "txt-Mstar") return std::make_unique<TxtLearner>(std::make_unique<MStarLearner>(fam, checked));
  if (name == "locking-Mstar") return std::make_unique<LockingTransform>(std::make_unique<MStarLearner>(fam, checked));
  if (name == "two-stage") return std::make_unique<TwoStageLearner>();
  if (name == "char-fit") return std::make_unique<CharFitLearner>(fam);
  if (name == "echo") return std::make_unique<EchoLearner>();
  if (name == "parity") {
    if (fam.size() < 2) throw PreconditionError("parity learner needs two family members");
    return std::make_unique<ParityLearner>(fam[0], fam[1]);
  }
  if (name.rfind("constant:", 0) == 0) {
    const std::string arg = name.substr(9);
    if (arg == "?") return std::make_unique<ConstantLearner>(std::nullopt);
    if (!arg.empty() && std::all_of(arg.begin(), arg.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const auto i = std::stoull(arg);
      if (i >= fam.size()) throw PreconditionError("constant: member index " + arg + " out of range");
      return std::make_unique<ConstantLearner>(fam[i]);
    }
    return std::make_unique<ConstantLearner>(parse_character_arg(arg));
  }
  throw UnknownName("unknown learner: " + name);
}

}  // namespace limitlearn
