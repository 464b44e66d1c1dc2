#ifndef ATOM_PREDICT_BASELINE_PREDICTORS_H
#define ATOM_PREDICT_BASELINE_PREDICTORS_H

#include "atom/predict/baselines.h"
#include "atom/predict/predictor.h"

namespace atom {

class ConstantVelocityPredictor : public HumanPredictor {
 public:
  explicit ConstantVelocityPredictor(int horizon) : horizon_(horizon) {}

  std::string name() const override { return "cv"; }
  int horizon() const override { return horizon_; }
  PredictionBundle Predict(const PredictionContext& ctx) override;

 private:
  int horizon_;
};

// Humans follow the Social Force model; the robot is extrapolated at
// constant velocity and acts only as a repeller.
class SocialForcePredictor : public HumanPredictor {
 public:
  SocialForcePredictor(int horizon, SocialForceParams params);

  std::string name() const override { return "sf"; }
  int horizon() const override { return horizon_; }
  PredictionBundle Predict(const PredictionContext& ctx) override;

 private:
  int horizon_;
  SocialForceParams params_;
};

}  // namespace atom

#endif  // ATOM_PREDICT_BASELINE_PREDICTORS_H
