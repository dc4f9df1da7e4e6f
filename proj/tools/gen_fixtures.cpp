// Writes the JSON fixtures shipped in data/.
#include <iostream>
#include <string>

#include "cauchyhull/fixtures.hpp"
#include "cauchyhull/io.hpp"

using namespace cauchyhull;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_fixtures <dir>\n";
        return 2;
    }
    const std::string dir = argv[1];
    auto put = [&](const std::string& name, PayloadKind kind, json payload) {
        write_document(make_document(kind, std::move(payload), json{{"fixture", name}}), dir + "/" + name + ".json");
    };
    put("torus_rep", PayloadKind::Representation, to_json(fixtures::punctured_torus()));
    put("torus_dec", PayloadKind::Decoration, to_json(fixtures::punctured_torus_decoration()));
    put("gamma2_rep", PayloadKind::Representation, to_json(fixtures::gamma2()));
    put("gamma2_dec", PayloadKind::Decoration, to_json(fixtures::gamma2_decoration()));
    put("tetrahedron", PayloadKind::ConeSurface, to_json(fixtures::tetrahedron()));
    put("pillowcase", PayloadKind::ConeSurface, to_json(fixtures::pillowcase()));
    put("square_torus", PayloadKind::ConeSurface, to_json(fixtures::square_torus()));
    return 0;
}
