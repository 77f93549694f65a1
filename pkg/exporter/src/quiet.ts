/**
 * Drop the tfjs "install the node backend" banner from CLI output; it is
 * advice about an optional native dependency, not a job diagnostic. Must be
 * imported before anything that pulls in @tensorflow/tfjs.
 */

const warn = console.warn.bind(console);
console.warn = (...args: unknown[]) => {
  if (typeof args[0] === 'string' && args[0].includes('tfjs-node')) return;
  warn(...args);
};

export {};
