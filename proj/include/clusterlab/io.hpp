#pragma once

// JSON forms of the combinatorial objects and DOT export of exchange graphs.
// Readers validate their input and throw std::invalid_argument.

#include <string>

#include "json.hpp"

#include "clusterlab/annulus.hpp"
#include "clusterlab/engine.hpp"
#include "clusterlab/laurent.hpp"
#include "clusterlab/paperlab.hpp"
#include "clusterlab/quiver.hpp"

namespace clusterlab {

using Json = nlohmann::json;

/// {"arity": n, "terms": [{"e": [...], "c": "<decimal>"}, ...]}
Json to_json(const LaurentPoly& p);
LaurentPoly laurent_from_json(const Json& j);

/// {"n": n, "arrows": [[s, t], ...]}, repeated for multiplicity.
Json to_json(const Quiver& q);
Quiver quiver_from_json(const Json& j);

/// {"quiver": ..., "cluster": [...]}
Json to_json(const Seed& s);
Seed seed_from_json(const Json& j);

/// {"e1": {"b": 0, "pos": 0}, "e2": {"b": 1, "pos": 2}}
Json to_json(const ArcLift& a);
ArcLift arc_from_json(const Json& j);

/// {"p": p, "q": q, "arcs": [...]}
Json to_json(const Triangulation& t);
Triangulation triangulation_from_json(const Json& j);

Json to_json(const TypeLabel& t);

/// Text key of a node: its canonical cluster, one variable per entry.
std::string node_key(const Seed& s);

/// {"depth": d, "nodes": [{"key", "depth", "seed"}], "edges": [[from, k, to]]}
Json to_json(const ExchangeGraph& g);

/// Nodes labelled by the denominator vectors of their clusters.
std::string to_dot(const ExchangeGraph& g);

/// {"name", "passed", "checks": [{"name", "passed", "detail"}], "witness", "context"}
Json to_json(const IdentityReport& r);

}  // namespace clusterlab
