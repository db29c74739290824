#ifndef SEMB_JSONIO_HPP
#define SEMB_JSONIO_HPP

// Interchange formats: the graph and embedding JSON documents (schemas under
// schemas/), plus small file helpers. Loaders validate structure and report
// the offending field path; saver/loader pairs round-trip exactly.

#include <string>

#include "semb/embedding.hpp"
#include "semb/graph.hpp"

namespace semb {

std::string graph_to_json(const GraphDesc& d);
GraphDesc graph_from_json(const std::string& text);

std::string embedding_to_json(const SEmbedding& s);
SEmbedding embedding_from_json(const std::string& text);

// Structural equality used by the round-trip check (exact field compare).
bool graphs_equal(const GraphDesc& a, const GraphDesc& b);
bool embeddings_equal(const SEmbedding& a, const SEmbedding& b);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace semb

#endif
