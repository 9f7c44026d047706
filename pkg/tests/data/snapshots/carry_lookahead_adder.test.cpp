// Step-protocol harness for the Verilated golden model of carry_lookahead_adder.
// Build (environment-gated):
//   verilator --cc carry_lookahead_adder.sv --exe test.cpp && make -C obj_dir -f Vcarry_lookahead_adder.mk
#include "Vcarry_lookahead_adder.h"
#include "verilated.h"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

// Extract the hex value of "name":"<hex>" from one canonical message line.
static unsigned long long read_hex_input(const std::string &line, const char *name) {
    std::string key = std::string("\"") + name + "\":\"";
    size_t at = line.find(key);
    if (at == std::string::npos) return 0;
    return strtoull(line.c_str() + at + key.size(), nullptr, 16);
}

template <typename W>
static void read_hex_wide(const std::string &line, const char *name, W &port, int words) {
    std::string key = std::string("\"") + name + "\":\"";
    size_t at = line.find(key);
    for (int w = 0; w < words; ++w) port[w] = 0;
    if (at == std::string::npos) return;
    size_t start = at + key.size();
    size_t end = line.find('"', start);
    std::string hex = line.substr(start, end - start);
    // consume nibbles from the low end into 32-bit words
    int bit = 0;
    for (int i = (int)hex.size() - 1; i >= 0; --i) {
        unsigned v = (unsigned)strtoul(hex.substr(i, 1).c_str(), nullptr, 16);
        port[bit / 32] |= v << (bit % 32);
        bit += 4;
    }
}

static std::string out_field(const char *name, unsigned long long value, int width) {
    char buf[64];
    (void)width;
    snprintf(buf, sizeof buf, "\"%s\":\"%llx\"", name, value);
    return std::string(buf);
}

template <typename W>
static std::string out_field_wide(const char *name, const W &port, int words) {
    std::string hex;
    bool lead = true;
    for (int w = words - 1; w >= 0; --w) {
        char buf[16];
        if (lead) {
            if (port[w] == 0 && w > 0) continue;
            snprintf(buf, sizeof buf, "%x", (unsigned)port[w]);
            lead = false;
        } else {
            snprintf(buf, sizeof buf, "%08x", (unsigned)port[w]);
        }
        hex += buf;
    }
    if (hex.empty()) hex = "0";
    return std::string("\"") + name + "\":\"" + hex + "\"";
}

static long long read_int_field(const std::string &line, const char *name) {
    std::string key = std::string("\"") + name + "\":";
    size_t at = line.find(key);
    if (at == std::string::npos) return 0;
    return strtoll(line.c_str() + at + key.size(), nullptr, 10);
}

int main(int argc, char **argv) {
    Verilated::commandArgs(argc, argv);
    Vcarry_lookahead_adder *top = new Vcarry_lookahead_adder;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find("\"type\":\"init\"") != std::string::npos) {
            std::cout << "{\"type\":\"ready\"}" << std::endl;
            continue;
        }
        if (line.find("\"type\":\"end\"") != std::string::npos) break;
        if (line.find("\"type\":\"step\"") == std::string::npos) continue;
        long long cycle = read_int_field(line, "cycle");
        top->a = (uint8_t)read_hex_input(line, "a");
        top->b = (uint8_t)read_hex_input(line, "b");
        top->cin = (uint8_t)read_hex_input(line, "cin");
        top->eval();
        std::string reply = "{\"type\":\"outputs\",\"cycle\":" + std::to_string(cycle) + ",\"outputs\":{";
        reply += out_field("sum", (unsigned long long)top->sum, 4);
        reply += ",";
        reply += out_field("cout", (unsigned long long)top->cout, 1);
        reply += "}}";
        std::cout << reply << std::endl;
    }
    top->final();
    delete top;
    return 0;
}
