#!/usr/bin/env node
/** CLI entry point: dpjscc-plot --spec spec.json */

import { loadSpec } from "./spec.js";
import { render } from "./render.js";

function usage(): never {
  process.stderr.write("usage: dpjscc-plot --spec <spec.json>\n");
  process.exit(2);
}

export function main(argv: string[]): number {
  let specPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") {
      specPath = argv[++i];
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      usage();
    } else {
      process.stderr.write(`unknown argument: ${argv[i]}\n`);
      usage();
    }
  }
  if (!specPath) usage();
  try {
    const result = render(loadSpec(specPath));
    for (const path of result.outputs) {
      process.stdout.write(`wrote ${path}\n`);
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
