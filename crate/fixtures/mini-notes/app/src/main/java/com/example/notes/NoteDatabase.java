package com.example.notes;

import android.content.Context;
import android.database.Cursor;
import android.database.sqlite.SQLiteDatabase;

import java.util.ArrayList;
import java.util.List;

public class NoteDatabase {
    private static final String TABLE = "notes";
    private final SQLiteDatabase db;

    public NoteDatabase(Context context) {
        db = context.openOrCreateDatabase("notes.db", Context.MODE_PRIVATE, null);
        db.execSQL("CREATE TABLE IF NOT EXISTS notes (id INTEGER PRIMARY KEY, body TEXT, stamp INTEGER)");
    }

    public List<String> bodies() {
        List<String> out = new ArrayList<>();
        Cursor cursor = db.rawQuery("SELECT id, body FROM notes ORDER BY stamp DESC", null);
        while (cursor.moveToNext()) {
            out.add(cursor.getString(1));
        }
        cursor.close();
        return out;
    }

    public int count() {
        Cursor c = db.rawQuery("select count(*) from " + TABLE, null);
        c.moveToFirst();
        int n = c.getInt(0);
        c.close();
        return n;
    }

    public void delete(long id) {
        db.execSQL("DELETE FROM notes WHERE id = " + id);
    }
}
