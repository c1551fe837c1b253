// Plain object on purpose: no imports, so the config loads even when the
// toolchain comes from globally installed packages instead of node_modules.

export default {
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the e2e smoke trains and serves a real model; give it room
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
};
