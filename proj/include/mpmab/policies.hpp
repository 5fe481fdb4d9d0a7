#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mpmab/errors.hpp"
#include "mpmab/policies/dynamic.hpp"
#include "mpmab/policies/eser.hpp"
#include "mpmab/policies/hopping.hpp"
#include "mpmab/policies/musical_chairs.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/policies/scf.hpp"
#include "mpmab/policies/trekking.hpp"
#include "mpmab/policies/ucb_policies.hpp"

namespace mpmab {

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"rh",  "sh",  "rhorand", "mctopm", "umctopm", "mc",   "dmc",
                                                 "mega", "scf", "dscf",    "tsn",    "tdn",     "eser", "meser"};
  return names;
}

enum class DynamicMode { epoch_reset, trek };

std::unique_ptr<Policy> make_policy(std::string_view name);

/// Makes a static algorithm usable in a network whose population changes.
inline std::unique_ptr<Policy> dynamic_wrapper(std::string_view base, DynamicMode mode) {
  if (mode == DynamicMode::trek) {
    if (base != "tsn") throw ConfigError("trek mode wraps tsn only");
    return std::make_unique<Trekking>(true);
  }
  const std::string b(base);
  const std::string label = b == "mc" ? "dmc" : b == "scf" ? "dscf" : "d" + b;
  return std::make_unique<EpochReset>([b] { return make_policy(b); }, label);
}

inline std::unique_ptr<Policy> make_policy(std::string_view name) {
  if (name == "rh") return std::make_unique<RandomHopPolicy>();
  if (name == "sh") return std::make_unique<SeqHopPolicy>();
  if (name == "rhorand") return std::make_unique<RhoRand>();
  if (name == "mctopm") return std::make_unique<MCTopM>(false);
  if (name == "umctopm") return std::make_unique<MCTopM>(true);
  if (name == "mc") return std::make_unique<MusicalChairs>();
  if (name == "mega") return std::make_unique<Mega>();
  if (name == "scf") return std::make_unique<Scf>();
  if (name == "tsn") return std::make_unique<Trekking>(false);
  if (name == "eser") return std::make_unique<Eser>(false);
  if (name == "meser") return std::make_unique<Eser>(true);
  if (name == "dmc") return dynamic_wrapper("mc", DynamicMode::epoch_reset);
  if (name == "dscf") return dynamic_wrapper("scf", DynamicMode::epoch_reset);
  if (name == "tdn") return dynamic_wrapper("tsn", DynamicMode::trek);
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

}  // namespace mpmab
