#pragma once

// Minimal stand-alone ASCII PLY parser used to check writer output without
// going through the library.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plyfix {

struct Element {
  std::string name;
  size_t count = 0;
  std::vector<std::string> property_types;
  std::vector<std::string> property_names;
  std::vector<std::vector<double>> rows;
};

struct File {
  std::string format;
  std::vector<Element> elements;

  const Element& element(const std::string& name) const {
    for (const auto& e : elements)
      if (e.name == name) return e;
    throw std::runtime_error("no element " + name);
  }
};

inline File read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw std::runtime_error("missing ply magic");
  File f;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string version;
      ls >> f.format >> version;
    } else if (key == "element") {
      Element e;
      ls >> e.name >> e.count;
      f.elements.push_back(e);
    } else if (key == "property") {
      if (f.elements.empty()) throw std::runtime_error("property before element");
      std::string type, name;
      ls >> type >> name;
      if (type == "list") throw std::runtime_error("list properties unsupported");
      f.elements.back().property_types.push_back(type);
      f.elements.back().property_names.push_back(name);
    } else if (key == "end_header") {
      header_done = true;
    } else if (key != "comment" && key != "obj_info") {
      throw std::runtime_error("unexpected header line: " + line);
    }
  }
  if (!header_done) throw std::runtime_error("unterminated header");
  if (f.format != "ascii") throw std::runtime_error("only ascii PLY supported");
  for (auto& e : f.elements) {
    for (size_t i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated body");
      std::istringstream ls(line);
      std::vector<double> row;
      double v;
      while (ls >> v) row.push_back(v);
      if (row.size() != e.property_names.size()) throw std::runtime_error("row width mismatch");
      e.rows.push_back(row);
    }
  }
  while (std::getline(in, line))
    if (!line.empty()) throw std::runtime_error("trailing data after body");
  return f;
}

}  // namespace plyfix
