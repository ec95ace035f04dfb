// Minimal external tagger: reads {"id", "tokens"} lines, answers {"id", "tags"}.
//   (default)   every alphabetic token NN, everything else SYM
//   --wrong-id  echoes a different id
//   --short     drops the last tag
//   --exit-after N  exits after N requests

#include <cctype>
#include <cstdlib>
#include <iostream>
#include <string>

#include <json.hpp>

int main(int argc, char** argv) {
  bool wrong_id = false, short_reply = false;
  long exit_after = -1;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--wrong-id") wrong_id = true;
    if (a == "--short") short_reply = true;
    if (a == "--exit-after" && i + 1 < argc) exit_after = std::atol(argv[++i]);
  }
  std::string line;
  long served = 0;
  while (std::getline(std::cin, line)) {
    if (exit_after >= 0 && served >= exit_after) return 3;
    const auto req = nlohmann::json::parse(line);
    nlohmann::json tags = nlohmann::json::array();
    for (const auto& t : req.at("tokens")) {
      const std::string s = t.get<std::string>();
      tags.push_back(!s.empty() && std::isalpha(static_cast<unsigned char>(s[0])) ? "NN" : "SYM");
    }
    if (short_reply && !tags.empty()) tags.erase(tags.end() - 1);
    const std::string id = wrong_id ? "x" + req.at("id").get<std::string>() : req.at("id").get<std::string>();
    std::cout << nlohmann::json{{"id", id}, {"tags", tags}}.dump() << std::endl;
    ++served;
  }
  return 0;
}
