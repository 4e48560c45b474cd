#pragma once

#include "toxblend/chem/graph.hpp"

namespace toxblend::chem {

/// Bemis-Murcko framework: ring systems plus linkers. Non-ring atoms of
/// degree one are stripped repeatedly; atoms doubly bonded to a retained atom
/// are then restored. Acyclic input gives the empty graph.
MolecularGraph murcko_scaffold(const MolecularGraph& g);

}  // namespace toxblend::chem
