// Prints the feature vector and comments of a single .tex file.
//   analyze_source paper.tex

#include <fstream>
#include <iostream>
#include <sstream>

#include "texscope/features.hpp"
#include "texscope/io.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: analyze_source FILE.tex\n";
    return 2;
  }
  std::ifstream in(argv[1], std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 2;
  }
  std::ostringstream bytes;
  bytes << in.rdbuf();

  texscope::lex::SourceDocument doc;
  doc.id = argv[1];
  doc.files.push_back({"main.tex", bytes.str()});
  doc.main_file = "main.tex";
  try {
    const auto analysis = texscope::features::analyze_document(doc);
    std::cout << texscope::io::to_json(analysis.features).dump(2) << "\n";
    for (const auto& c : analysis.comments) std::cout << texscope::io::to_json(doc.id, c).dump() << "\n";
  } catch (const texscope::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
