#!/usr/bin/env node
/** Usage: aoilab-figures <results-dir> <figures-dir> */

import { renderAll } from "./render";

export function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: aoilab-figures <results-dir> <figures-dir>");
    return 2;
  }
  const [resultsDir, figuresDir] = argv;
  try {
    const written = renderAll(resultsDir, figuresDir);
    for (const path of written) {
      console.log(`wrote ${path}`);
    }
    return 0;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : String(error)}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
