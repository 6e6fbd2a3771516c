#pragma once

#include "jplse/step_function.hpp"

#include <string>

namespace jplse {

// Test signal selection for experiments. `scale` multiplies function values.
struct SignalSpec {
    enum class Kind { Blocks, CustomStep, Smooth, Sampled };

    Kind kind = Kind::Blocks;
    double scale = 1.0;
    StepFunction custom;  // CustomStep
    std::string name;     // Smooth: "sin" (sin 2 pi t) or "ramp" (t)
    std::string file;     // Sampled: CSV of cell means

    // "blocks", "blocks:scale=2", "sin", "ramp", "step:<json>", "sampled:<csv>"
    static SignalSpec parse(const std::string& text);
    std::string describe() const;
};

// The blocks test signal, loaded from the checked-in constants file
// (data/blocks.csv; override the directory with JPLSE_DATA_DIR).
StepFunction blocks_signal(double scale = 1.0);

bool signal_is_step(const SignalSpec& spec);
StepFunction signal_step(const SignalSpec& spec); // Blocks / CustomStep only
SampledSignal signal_cell_means(const SignalSpec& spec, Eigen::Index n);
double signal_squared_norm(const SignalSpec& spec); // int f^2
double signal_mean(const SignalSpec& spec);         // int f
double signal_sd(const SignalSpec& spec);           // sqrt(int f^2 - (int f)^2)
// Inner product of a step function with the signal, exact for step and
// named smooth signals.
double signal_inner(const SignalSpec& spec, const StepFunction& g);
// Pointwise value; step and smooth signals only.
double signal_value(const SignalSpec& spec, double t);

} // namespace jplse
