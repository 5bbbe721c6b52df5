#include "enero/graphml.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "enero/error.hpp"

namespace enero {
namespace {

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;      // </name>
  bool self_closing = false; // <name ... />
  size_t end = 0;            // offset just past '>'
};

// Parses the tag starting at xml[pos] == '<'. Comments and processing
// instructions are skipped by the caller.
Tag parse_tag(const std::string& xml, size_t pos) {
  Tag tag;
  size_t close = xml.find('>', pos);
  if (close == std::string::npos) throw ParseError("unterminated tag in GraphML");
  tag.end = close + 1;
  size_t i = pos + 1;
  if (xml[i] == '/') {
    tag.closing = true;
    ++i;
  }
  size_t name_start = i;
  while (i < close && !std::isspace(static_cast<unsigned char>(xml[i])) &&
         xml[i] != '/') {
    ++i;
  }
  tag.name = xml.substr(name_start, i - name_start);
  // Attributes: name="value" pairs.
  while (i < close) {
    while (i < close && (std::isspace(static_cast<unsigned char>(xml[i])))) ++i;
    if (i >= close || xml[i] == '/') break;
    size_t key_start = i;
    while (i < close && xml[i] != '=') ++i;
    if (i >= close) break;
    std::string key = xml.substr(key_start, i - key_start);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) {
      key.pop_back();
    }
    ++i;  // '='
    while (i < close && std::isspace(static_cast<unsigned char>(xml[i]))) ++i;
    if (i >= close || (xml[i] != '"' && xml[i] != '\'')) {
      throw ParseError("malformed attribute in GraphML tag <" + tag.name + ">");
    }
    char quote = xml[i++];
    size_t val_start = i;
    while (i < close && xml[i] != quote) ++i;
    tag.attrs[key] = xml.substr(val_start, i - val_start);
    ++i;  // closing quote
  }
  if (close > pos && xml[close - 1] == '/') tag.self_closing = true;
  return tag;
}

}  // namespace

Topology parse_graphml(const std::string& xml, const GraphMLOptions& options) {
  std::map<std::string, std::string> edge_key_names;  // key id -> attr.name
  std::map<std::string, NodeId> node_ids;             // graphml node id -> dense id
  TopologyBuilder builder;
  int node_count = 0;

  enum class Scope { kNone, kNode, kEdge };
  Scope scope = Scope::kNone;
  std::string scope_node_id;
  std::string edge_src, edge_dst;
  double edge_capacity = options.default_capacity;
  std::string pending_data_key;

  size_t pos = 0;
  std::vector<std::pair<std::pair<std::string, std::string>, double>> edges;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    if (xml.compare(pos, 4, "<!--") == 0) {
      size_t end = xml.find("-->", pos);
      if (end == std::string::npos) throw ParseError("unterminated GraphML comment");
      pos = end + 3;
      continue;
    }
    if (xml.compare(pos, 2, "<?") == 0 || xml.compare(pos, 2, "<!") == 0) {
      pos = xml.find('>', pos);
      if (pos == std::string::npos) break;
      ++pos;
      continue;
    }
    Tag tag = parse_tag(xml, pos);
    size_t content_start = tag.end;

    if (tag.name == "key" && !tag.closing) {
      auto id = tag.attrs.find("id");
      auto name = tag.attrs.find("attr.name");
      auto domain = tag.attrs.find("for");
      if (id != tag.attrs.end() && name != tag.attrs.end() &&
          (domain == tag.attrs.end() || domain->second == "edge")) {
        edge_key_names[id->second] = name->second;
      }
    } else if (tag.name == "node") {
      if (!tag.closing) {
        auto id = tag.attrs.find("id");
        if (id == tag.attrs.end()) throw ParseError("GraphML node without id");
        if (node_ids.count(id->second)) {
          throw ParseError("duplicate GraphML node id '" + id->second + "'");
        }
        node_ids[id->second] = node_count;
        builder.set_node_label(node_count, id->second);
        ++node_count;
        scope = tag.self_closing ? Scope::kNone : Scope::kNode;
      } else {
        scope = Scope::kNone;
      }
    } else if (tag.name == "edge") {
      if (!tag.closing) {
        auto s = tag.attrs.find("source");
        auto t = tag.attrs.find("target");
        if (s == tag.attrs.end() || t == tag.attrs.end()) {
          throw ParseError("GraphML edge without source/target");
        }
        edge_src = s->second;
        edge_dst = t->second;
        edge_capacity = options.default_capacity;
        if (tag.self_closing) {
          edges.push_back({{edge_src, edge_dst}, edge_capacity});
        } else {
          scope = Scope::kEdge;
        }
      } else {
        edges.push_back({{edge_src, edge_dst}, edge_capacity});
        scope = Scope::kNone;
      }
    } else if (tag.name == "data" && !tag.closing && scope == Scope::kEdge) {
      auto key = tag.attrs.find("key");
      if (key != tag.attrs.end() && !tag.self_closing) {
        size_t text_end = xml.find('<', content_start);
        if (text_end == std::string::npos) throw ParseError("unterminated data element");
        auto name = edge_key_names.find(key->second);
        if (name != edge_key_names.end() && name->second == options.capacity_attr) {
          std::string value = xml.substr(content_start, text_end - content_start);
          try {
            edge_capacity = std::stod(value);
          } catch (const std::exception&) {
            throw ParseError("bad capacity value '" + value + "' in GraphML");
          }
        }
      }
    }
    pos = tag.end;
    (void)pending_data_key;
  }

  if (node_count == 0) throw ParseError("GraphML contains no nodes");
  builder.set_num_nodes(node_count);
  for (const auto& [pair, cap] : edges) {
    auto s = node_ids.find(pair.first);
    auto t = node_ids.find(pair.second);
    if (s == node_ids.end() || t == node_ids.end()) {
      throw ParseError("GraphML edge references unknown node");
    }
    double w = 1.0;
    if (options.weight_mode == WeightMode::kInverseCapacity && cap > 0.0) {
      w = 1.0 / cap;
    }
    builder.add_edge(s->second, t->second, cap, w);
  }
  return builder.build(options.limits);
}

Topology load_graphml_file(const std::string& path, const GraphMLOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open GraphML file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Topology t = parse_graphml(ss.str(), options);
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  t.set_name(dot == std::string::npos ? base : base.substr(0, dot));
  return t;
}

}  // namespace enero
