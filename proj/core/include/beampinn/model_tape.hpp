#pragma once

#include "beampinn/hybrid_model.hpp"
#include "beampinn/tape.hpp"

namespace beampinn {

enum class Direction { kTime, kSpace };

/// Records w(t, x) on the tape as a jet along `direction`, with the tape's
/// order. Every model parameter becomes a leaf whose id is its index in
/// model.params(). Unlike eval_model_jets, the Fourier terms also go through
/// jet arithmetic here, which makes this an independent route for audits.
NodeId record_model(Tape& tape, const HybridModel& model, double t, double x, Direction direction);

}  // namespace beampinn
