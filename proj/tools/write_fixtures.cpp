// Regenerates the corpus fixtures: write_fixtures <corpus dir>
#include <closurekb/cli.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    if (argc != 2) {
        std::cerr << "usage: write_fixtures <corpus dir>\n";
        return 2;
    }
    for (const auto& [rel, text] : closurekb::cli::corpus_fixtures()) {
        fs::path p = fs::path(argv[1]) / rel;
        fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << text;
        if (p.extension() == ".sh") {
            fs::permissions(p, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                            fs::perm_options::add);
        }
    }
    return 0;
}
