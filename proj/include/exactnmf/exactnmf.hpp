#ifndef EXACTNMF_EXACTNMF_HPP
#define EXACTNMF_EXACTNMF_HPP
// Umbrella header.
#include "exactnmf/geometry.hpp"
#include "exactnmf/io.hpp"
#include "exactnmf/linalg.hpp"
#include "exactnmf/linprog.hpp"
#include "exactnmf/matrix.hpp"
#include "exactnmf/reductions.hpp"
#include "exactnmf/sat.hpp"
#include "exactnmf/search.hpp"

#endif
