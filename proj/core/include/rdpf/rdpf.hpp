#pragma once

// Umbrella header for the rdpf library.

#include "rdpf/bounds.hpp"
#include "rdpf/diagnostics.hpp"
#include "rdpf/divergence.hpp"
#include "rdpf/kernel.hpp"
#include "rdpf/nam.hpp"
#include "rdpf/oracle.hpp"
#include "rdpf/prob.hpp"
#include "rdpf/ram.hpp"
#include "rdpf/solve_report.hpp"
#include "rdpf/sweep.hpp"
