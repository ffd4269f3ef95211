#include "ac/io.hpp"

#include <doctest.h>

using namespace ac;

TEST_CASE("sha256 standard vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // block-boundary lengths
    std::string block55(55, 'a'), block64(64, 'a');
    CHECK(sha256_hex(block55) ==
          "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
    CHECK(sha256_hex(block64) ==
          "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}

TEST_CASE("float formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, 2.0e-300, -7.25, 6.02214076e23}) {
        std::string s = fmt_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("csv row join") {
    CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
    CHECK(csv_row({"solo"}) == "solo\n");
}
