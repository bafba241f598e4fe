// Lists the maximal comments of a short string under the reference oracle.
//   maximal_comments 'a %b'

#include <iostream>
#include <string>

#include "texscope/semantic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: maximal_comments STRING\n";
    return 2;
  }
  const std::string s = argv[1];
  const auto oracle = texscope::semantic::reference_oracle();
  std::vector<texscope::semantic::Interval> spans;
  try {
    spans = texscope::semantic::partition_maximal_comments(s, oracle);
  } catch (const texscope::semantic::OverlappingMaximalComments& e) {
    std::cout << "overlapping maximal comments:\n";
    spans = e.spans();
  }
  for (const auto& iv : spans) {
    std::cout << "[" << iv.first << "," << iv.last << "] \"" << s.substr(iv.first - 1, iv.last - iv.first + 1) << "\"\n";
  }
}
