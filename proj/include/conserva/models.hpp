#pragma once

#include <memory>

#include "conserva/model.hpp"
#include "conserva/models/bbm_bbm.hpp"
#include "conserva/models/p_system.hpp"
#include "conserva/models/scalar_1d.hpp"
#include "conserva/models/swe_2d.hpp"

namespace conserva {

inline std::shared_ptr<const Model> make_model(const ModelConfig& cfg,
                                               std::shared_ptr<const OperatorSet> ops) {
  switch (cfg.id) {
    case ModelId::fornberg_whitham: return std::make_shared<FornbergWhithamModel>(std::move(ops));
    case ModelId::camassa_holm: return std::make_shared<CamassaHolmModel>(std::move(ops));
    case ModelId::degasperis_procesi: return std::make_shared<DegasperisProcesiModel>(std::move(ops));
    case ModelId::bbm_bbm_H: return std::make_shared<BbmBbmModel>(std::move(ops), true);
    case ModelId::bbm_bbm_I: return std::make_shared<BbmBbmModel>(std::move(ops), false);
    case ModelId::holm_hone: return std::make_shared<HolmHoneModel>(std::move(ops));
    case ModelId::linear_dispersive: return std::make_shared<LinearDispersiveModel>(std::move(ops));
    case ModelId::kdv: return std::make_shared<KdvModel>(std::move(ops));
    case ModelId::p_system: return std::make_shared<PSystemModel>(std::move(ops), cfg);
    case ModelId::swe_2d:
      throw std::invalid_argument("make_model: swe_2d needs two operator sets, use make_model_2d");
  }
  throw std::logic_error("make_model: unreachable");
}

inline std::shared_ptr<const Model> make_model_2d(const ModelConfig& cfg,
                                                  std::shared_ptr<const OperatorSet> ops_x,
                                                  std::shared_ptr<const OperatorSet> ops_y) {
  if (cfg.id != ModelId::swe_2d)
    throw std::invalid_argument("make_model_2d: only swe_2d is a 2D model");
  return std::make_shared<Swe2dModel>(std::move(ops_x), std::move(ops_y), cfg);
}

/// Relaxation / projection target used in the experiments when the
/// configuration does not name one explicitly: the nonlinear functional each
/// scheme provably conserves.
inline std::string default_invariant_target(ModelId id) {
  switch (id) {
    case ModelId::fornberg_whitham:
    case ModelId::camassa_holm:
    case ModelId::degasperis_procesi:
    case ModelId::bbm_bbm_I: return "secondary";
    case ModelId::bbm_bbm_H:
    case ModelId::holm_hone: return "hamiltonian";
    case ModelId::linear_dispersive:
    case ModelId::kdv:
    case ModelId::p_system:
    case ModelId::swe_2d: return "energy";
  }
  throw std::logic_error("default_invariant_target: unreachable");
}

}  // namespace conserva
