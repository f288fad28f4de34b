package com.example.notes;

import android.content.Context;

import java.io.File;
import java.io.FileOutputStream;
import java.io.FileWriter;
import java.io.IOException;
import java.io.OutputStream;
import java.util.List;

public final class NoteStore {
    private NoteStore() {
    }

    public static List<String> all(Context context) {
        return new NoteDatabase(context).bodies();
    }

    public static void save(Context context, long id, String body) {
        try {
            OutputStream out = context.openFileOutput("note-" + id + ".txt", Context.MODE_PRIVATE);
            out.write(body.getBytes());
            out.close();
        } catch (IOException e) {
            // The note stays in memory until the next save.
        }
    }

    public static void export(Context context, String body) throws IOException {
        File target = new File(context.getFilesDir(), "/export/notes.txt");
        FileWriter writer = new FileWriter(target);
        writer.write(body);
        writer.close();
        FileOutputStream backup = new FileOutputStream("/sdcard/backup/notes.bak");
        backup.write(body.getBytes());
        backup.close();
    }
}
